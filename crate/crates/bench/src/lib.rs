//! Fixed inputs shared by the benchmarks.

use tourney_core::Tournament;

/// Deterministic pseudo-random tournament: pair `(i, j)` goes to `i` when
/// bit `(i * 31 + j * 17) % 64` of `salt` is set.
pub fn fixture(n: usize, salt: u64) -> Tournament {
    Tournament::from_fn(n, |i, j| salt >> ((i * 31 + j * 17) % 64) & 1 == 1)
        .expect("n within limits")
}
