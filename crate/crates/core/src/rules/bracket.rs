//! Explicit d-ary brackets: leaf assignment plus inner-node marks.
//!
//! Nodes are stored heap-style: the root is node 0, the children of node `v`
//! are `d*v+1 ..= d*v+d`, inner nodes come first and the `d^h` leaves last.
//! Every inner node carries a mark in `0..d`; it selects the child that
//! advances when the children's labels have no Condorcet winner.
//!
//! Padding teams are never materialized: indices `>= n` are dummies, which
//! lose to every real team, and among dummies the lower index wins.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use super::rdseb::RdsebPlan;
use super::{RuleError, WinDistribution};
use crate::rational::Rational;
use crate::tournament::Tournament;

/// Largest `leaves! * d^inner` the brute-force enumerator accepts.
pub const BRUTE_FORCE_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    pub d: usize,
    pub height: u32,
    /// Padded team placed at each leaf, left to right.
    pub leaves: Vec<usize>,
    /// Mark of each inner node, in heap order.
    pub marks: Vec<usize>,
}

/// Does padded team `a` beat padded team `b`?
pub(crate) fn padded_beats(t: &Tournament, a: usize, b: usize) -> bool {
    let n = t.n();
    match (a < n, b < n) {
        (true, true) => t.beats(a, b),
        (true, false) => true,
        (false, true) => false,
        (false, false) => a < b,
    }
}

impl Bracket {
    pub fn inner_nodes(&self) -> usize {
        self.marks.len()
    }

    /// Labels of every node under `t`, heap order; entry 0 is the winner.
    pub fn resolve(&self, t: &Tournament) -> Vec<usize> {
        let inner = self.inner_nodes();
        let mut labels = vec![0usize; inner + self.leaves.len()];
        labels[inner..].copy_from_slice(&self.leaves);
        for v in (0..inner).rev() {
            let children = &labels[self.d * v + 1..=self.d * v + self.d];
            let condorcet = children
                .iter()
                .copied()
                .find(|&x| children.iter().all(|&y| y == x || padded_beats(t, x, y)));
            labels[v] = condorcet.unwrap_or(children[self.marks[v]]);
        }
        labels
    }

    pub fn winner(&self, t: &Tournament) -> usize {
        self.resolve(t)[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledBracket {
    pub bracket: Bracket,
    /// Winning padded index; `>= n` means a dummy won.
    pub winner: usize,
    pub labels: Vec<usize>,
}

/// One run of the randomized bracket: uniform leaf assignment and
/// independent uniform marks.
pub fn sample_bracket(
    t: &Tournament,
    d: usize,
    rng: &mut dyn RngCore,
) -> Result<SampledBracket, RuleError> {
    let plan = RdsebPlan::new(t.n(), d)?;
    let mut leaves: Vec<usize> = (0..plan.leaves).collect();
    leaves.shuffle(rng);
    let marks = (0..plan.inner_nodes())
        .map(|_| rng.random_range(0..d))
        .collect();
    let bracket = Bracket {
        d,
        height: plan.height,
        leaves,
        marks,
    };
    let labels = bracket.resolve(t);
    Ok(SampledBracket {
        winner: labels[0],
        bracket,
        labels,
    })
}

/// Exact distribution by enumerating every leaf assignment and every mark
/// vector. Factorial cost; kept as an independent check of the recursion.
pub fn brute_force_rdseb(t: &Tournament, d: usize) -> Result<WinDistribution, RuleError> {
    let plan = RdsebPlan::new(t.n(), d)?;
    let inner = plan.inner_nodes();
    let work = (1..=plan.leaves as u64)
        .try_fold(1u64, |acc, k| acc.checked_mul(k))
        .and_then(|f| f.checked_mul((d as u64).checked_pow(inner as u32)?));
    match work {
        Some(w) if w <= BRUTE_FORCE_CAP => {}
        _ => {
            return Err(RuleError::Infeasible {
                what: format!(
                    "brute-force bracket enumeration over {} leaves",
                    plan.leaves
                ),
                required: work.map_or("overflow".into(), |w| w.to_string()),
                cap: BRUTE_FORCE_CAP,
            })
        }
    }
    let mut wins = vec![0u64; plan.leaves];
    let mut total = 0u64;
    for leaves in (0..plan.leaves).permutations(plan.leaves) {
        let mut bracket = Bracket {
            d,
            height: plan.height,
            leaves,
            marks: vec![0; inner],
        };
        'marks: loop {
            wins[bracket.winner(t)] += 1;
            total += 1;
            for m in bracket.marks.iter_mut() {
                *m += 1;
                if *m < d {
                    continue 'marks;
                }
                *m = 0;
            }
            break;
        }
    }
    let total = total as i64;
    let n = t.n();
    let probs = wins[..n]
        .iter()
        .map(|&w| Rational::new(w as i64, total))
        .collect();
    let dummy = Rational::new(wins[n..].iter().sum::<u64>() as i64, total);
    Ok(WinDistribution::new(probs, dummy))
}
