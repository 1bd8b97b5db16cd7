//! Labeled tournaments as bit matrices.
//!
//! Row `i` of a [`Tournament`] is a `u64` whose bit `j` is set iff team `i`
//! beats team `j`, so at most [`MAX_TEAMS`] teams are representable. Match
//! outcomes are indexed by the upper-triangle pair order
//! `(0,1), (0,2), …, (0,n-1), (1,2), …`; the same order drives exhaustive
//! enumeration and the compact text format.

use std::fmt;
use std::ops::Range;

use rand::Rng;
use serde::{Serialize, Serializer};

pub const MAX_TEAMS: usize = 64;

/// Largest team count accepted by [`enumerate_tournaments`]; 2^C(8,2) = 2^28.
pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TournamentError {
    #[error("a tournament needs at least one team")]
    Empty,
    #[error("{0} teams exceeds the supported maximum of {MAX_TEAMS}")]
    TooManyTeams(usize),
    #[error("team {team} out of range for {n} teams")]
    TeamOutOfRange { team: usize, n: usize },
    #[error("matrix is not a tournament: {0}")]
    Invalid(String),
    #[error(
        "exhaustive enumeration of {n} teams needs 2^{pairs} tournaments; the cap is {ENUMERATION_CAP} teams"
    )]
    EnumerationCap { n: usize, pairs: usize },
    #[error("cannot pad {n} teams down to {target}")]
    PadTarget { n: usize, target: usize },
}

/// Subset of teams, as a bitmask over indices `0..64`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TeamSet(u64);

impl TeamSet {
    pub const EMPTY: TeamSet = TeamSet(0);

    pub const fn from_mask(mask: u64) -> Self {
        TeamSet(mask)
    }

    /// `{0, …, n-1}`.
    pub fn all(n: usize) -> Self {
        TeamSet(low_mask(n))
    }

    pub fn singleton(team: usize) -> Self {
        TeamSet(1 << team)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, team: usize) -> bool {
        team < 64 && self.0 >> team & 1 == 1
    }

    pub fn insert(&mut self, team: usize) {
        self.0 |= 1 << team;
    }

    pub fn remove(&mut self, team: usize) {
        self.0 &= !(1 << team);
    }

    pub fn union(self, other: TeamSet) -> TeamSet {
        TeamSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TeamSet) -> TeamSet {
        TeamSet(self.0 & other.0)
    }

    pub fn difference(self, other: TeamSet) -> TeamSet {
        TeamSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: TeamSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(self) -> TeamSetIter {
        TeamSetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for TeamSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = TeamSet::EMPTY;
        for team in iter {
            set.insert(team);
        }
        set
    }
}

impl IntoIterator for TeamSet {
    type Item = usize;
    type IntoIter = TeamSetIter;
    fn into_iter(self) -> TeamSetIter {
        self.iter()
    }
}

impl fmt::Debug for TeamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for TeamSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

pub struct TeamSetIter(u64);

impl Iterator for TeamSetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let team = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(team)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let len = self.0.count_ones() as usize;
        (len, Some(len))
    }
}

impl ExactSizeIterator for TeamSetIter {}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Number of matches among `n` teams, C(n,2).
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the pair `(i, j)`, `i < j`, in upper-triangle row-major order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Pairs `(i, j)` with `i < j`, in upper-triangle row-major order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// A complete, irreflexive, antisymmetric match record on `n` labeled teams.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    rows: Vec<u64>,
}

impl Tournament {
    /// Builds a tournament from `upper(i, j)` for every pair `i < j`, which
    /// returns true iff `i` beats `j`.
    pub fn from_fn(
        n: usize,
        mut upper: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, TournamentError> {
        check_size(n)?;
        let mut rows = vec![0u64; n];
        for (i, j) in pairs(n) {
            if upper(i, j) {
                rows[i] |= 1 << j;
            } else {
                rows[j] |= 1 << i;
            }
        }
        Ok(Tournament { n, rows })
    }

    /// Validates a full boolean matrix.
    pub fn from_matrix(beats: &[Vec<bool>]) -> Result<Self, TournamentError> {
        let n = beats.len();
        check_size(n)?;
        let mut rows = vec![0u64; n];
        for (i, row) in beats.iter().enumerate() {
            if row.len() != n {
                return Err(TournamentError::Invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                if i == j && b {
                    return Err(TournamentError::Invalid(format!("team {i} beats itself")));
                }
                if b {
                    rows[i] |= 1 << j;
                }
            }
        }
        for (i, j) in pairs(n) {
            let (a, b) = (rows[i] >> j & 1, rows[j] >> i & 1);
            if a == b {
                return Err(TournamentError::Invalid(format!(
                    "teams {i} and {j}: exactly one must beat the other"
                )));
            }
        }
        Ok(Tournament { n, rows })
    }

    /// The tournament whose pair bits (see [`pair_index`]) are the bits of
    /// `index`.
    pub fn from_index(n: usize, index: u64) -> Result<Self, TournamentError> {
        if pair_count(n) > 64 {
            return Err(TournamentError::TooManyTeams(n));
        }
        let mut bit = 0;
        Self::from_fn(n, |_, _| {
            let b = index >> bit & 1 == 1;
            bit += 1;
            b
        })
    }

    /// Inverse of [`Tournament::from_index`]; `None` when C(n,2) > 64.
    pub fn index(&self) -> Option<u64> {
        if pair_count(self.n) > 64 {
            return None;
        }
        Some(
            pairs(self.n)
                .enumerate()
                .filter(|&(_, (i, j))| self.beats(i, j))
                .fold(0u64, |acc, (k, _)| acc | 1 << k),
        )
    }

    /// Pair bits in upper-triangle order.
    pub fn pair_bits(&self) -> Vec<bool> {
        pairs(self.n).map(|(i, j)| self.beats(i, j)).collect()
    }

    /// Each match decided by an independent fair coin.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, TournamentError> {
        Self::from_fn(n, |_, _| rng.random_bool(0.5))
    }

    /// `i` beats `i+1, …, i+(n-1)/2` modulo `n`; `n` must be odd.
    pub fn rotational(n: usize) -> Result<Self, TournamentError> {
        if n.is_multiple_of(2) {
            return Err(TournamentError::Invalid(format!(
                "rotational tournaments need an odd team count, got {n}"
            )));
        }
        let half = (n - 1) / 2;
        Self::from_fn(n, |i, j| j - i <= half)
    }

    /// Transitive tournament where lower index always wins.
    pub fn transitive(n: usize) -> Result<Self, TournamentError> {
        Self::from_fn(n, |_, _| true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// δ⁺(i): the teams `i` beats.
    pub fn wins(&self, i: usize) -> TeamSet {
        TeamSet(self.rows[i])
    }

    /// δ⁻(i): the teams beating `i`.
    pub fn losses(&self, i: usize) -> TeamSet {
        TeamSet(low_mask(self.n) & !self.rows[i] & !(1 << i))
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.n - 1 - self.out_degree(i)
    }

    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn teams(&self) -> TeamSet {
        TeamSet::all(self.n)
    }

    /// The team beating every other team, if any.
    pub fn condorcet_winner(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.out_degree(i) == self.n - 1)
    }

    /// Condorcet winner of the sub-tournament induced by `set`.
    pub fn condorcet_winner_within(&self, set: TeamSet) -> Option<usize> {
        set.iter()
            .find(|&i| self.rows[i] & set.0 == set.0 & !(1 << i))
    }

    /// Minimal nonempty set of teams that loses no match to an outsider.
    ///
    /// A team of maximum out-degree always belongs to it, and any team
    /// beating a member must be a member, so the set is the closure of that
    /// team under "is beaten by".
    pub fn top_cycle(&self) -> TeamSet {
        self.top_cycle_within(self.teams())
    }

    /// Top cycle of the sub-tournament induced by `set` (nonempty).
    pub fn top_cycle_within(&self, set: TeamSet) -> TeamSet {
        let start = set
            .iter()
            .max_by_key(|&i| ((self.rows[i] & set.0).count_ones(), std::cmp::Reverse(i)))
            .expect("top cycle of an empty set");
        let mut cycle = TeamSet::singleton(start);
        let mut frontier = cycle;
        while !frontier.is_empty() {
            let mut next = TeamSet::EMPTY;
            for member in frontier {
                next = next.union(self.losses(member).intersection(set));
            }
            frontier = next.difference(cycle);
            cycle = cycle.union(frontier);
        }
        cycle
    }

    /// Copy with the outcome of the match between `i` and `j` set.
    pub fn with_result(&self, winner: usize, loser: usize) -> Tournament {
        let mut t = self.clone();
        t.rows[winner] |= 1 << loser;
        t.rows[loser] &= !(1 << winner);
        t
    }

    /// Copy with the match between `i` and `j` reversed.
    pub fn flipped(&self, i: usize, j: usize) -> Tournament {
        if self.beats(i, j) {
            self.with_result(j, i)
        } else {
            self.with_result(i, j)
        }
    }

    /// Sub-tournament on `teams`, relabeled `0..teams.len()` in the given
    /// order. Teams must be distinct.
    pub fn induced(&self, teams: &[usize]) -> Tournament {
        let k = teams.len();
        let mut rows = vec![0u64; k];
        for (a, &ta) in teams.iter().enumerate() {
            for (b, &tb) in teams.iter().enumerate() {
                if a != b && self.beats(ta, tb) {
                    rows[a] |= 1 << b;
                }
            }
        }
        Tournament { n: k, rows }
    }

    /// Relabels so that team `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Tournament {
        let mut rows = vec![0u64; self.n];
        for i in 0..self.n {
            for j in self.wins(i) {
                rows[perm[i]] |= 1 << perm[j];
            }
        }
        Tournament { n: self.n, rows }
    }

    /// All tournaments agreeing with `self` outside the matches internal to
    /// `coalition`, in variant-index order (see [`variant_of`]).
    pub fn adjacency_variants(&self, coalition: TeamSet) -> AdjacencyVariants<'_> {
        let members = coalition.to_vec();
        let inner = pair_count(members.len());
        AdjacencyVariants {
            base: self,
            members,
            next: 0,
            end: 1u64 << inner,
        }
    }

    /// Extends to `target` teams. Dummies lose to every real team; among
    /// dummies the lower index wins.
    pub fn pad_with_dummies(&self, target: usize) -> Result<Tournament, TournamentError> {
        if target < self.n {
            return Err(TournamentError::PadTarget { n: self.n, target });
        }
        check_size(target)?;
        let n = self.n;
        Tournament::from_fn(target, |i, j| if j < n { self.beats(i, j) } else { true })
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.beats(i, j)).collect())
            .collect()
    }
}

/// The S-adjacent variant of `base` selected by `variant`: bit `p` of
/// `variant` set means the lower-indexed member wins the `p`-th internal
/// pair of `members` (sorted ascending).
pub fn variant_of(base: &Tournament, members: &[usize], variant: u64) -> Tournament {
    let mut t = base.clone();
    let mut bit = 0;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            if variant >> bit & 1 == 1 {
                t.rows[i] |= 1 << j;
                t.rows[j] &= !(1 << i);
            } else {
                t.rows[j] |= 1 << i;
                t.rows[i] &= !(1 << j);
            }
            bit += 1;
        }
    }
    t
}

pub struct AdjacencyVariants<'a> {
    base: &'a Tournament,
    members: Vec<usize>,
    next: u64,
    end: u64,
}

impl Iterator for AdjacencyVariants<'_> {
    type Item = Tournament;
    fn next(&mut self) -> Option<Tournament> {
        if self.next == self.end {
            return None;
        }
        let t = variant_of(self.base, &self.members, self.next);
        self.next += 1;
        Some(t)
    }
}

fn check_size(n: usize) -> Result<(), TournamentError> {
    if n == 0 {
        Err(TournamentError::Empty)
    } else if n > MAX_TEAMS {
        Err(TournamentError::TooManyTeams(n))
    } else {
        Ok(())
    }
}

/// Number of labeled tournaments on `n` teams, if within the cap.
pub fn tournament_count(n: usize) -> Result<u64, TournamentError> {
    if n == 0 {
        return Err(TournamentError::Empty);
    }
    if n > ENUMERATION_CAP {
        return Err(TournamentError::EnumerationCap {
            n,
            pairs: pair_count(n),
        });
    }
    Ok(1u64 << pair_count(n))
}

/// Every labeled tournament on `n` teams, in index order.
pub fn enumerate_tournaments(n: usize) -> Result<TournamentRange, TournamentError> {
    let count = tournament_count(n)?;
    Ok(TournamentRange { n, range: 0..count })
}

/// Tournaments with indices in `range`; used to split enumeration across
/// workers.
pub fn enumerate_range(n: usize, range: Range<u64>) -> Result<TournamentRange, TournamentError> {
    let count = tournament_count(n)?;
    Ok(TournamentRange {
        n,
        range: range.start.min(count)..range.end.min(count),
    })
}

#[derive(Debug, Clone)]
pub struct TournamentRange {
    n: usize,
    range: Range<u64>,
}

impl Iterator for TournamentRange {
    type Item = Tournament;
    fn next(&mut self) -> Option<Tournament> {
        let index = self.range.next()?;
        Some(Tournament::from_index(self.n, index).expect("index within cap"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.range.size_hint()
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament({})", crate::format::to_compact(self))
    }
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::to_text(self))
    }
}
