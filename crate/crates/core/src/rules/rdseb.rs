//! Exact evaluation of the randomized d-ary single-elimination bracket.
//!
//! A uniform leaf assignment of the `d^h` padded teams splits them into `d`
//! blocks of `d^(h-1)` teams, each a uniform random subset, and each block
//! again recursively. The winner distribution of a subset therefore only
//! depends on the subset, which is memoized by bitmask. Blocks are
//! exchangeable, so the recursion sums over unordered partitions.
//!
//! Inside the recursion everything is an integer count: for a subset `X`,
//! `count[w]` is the number of (unordered partition tree, mark vector)
//! combinations in which `w` wins. A node whose children have a Condorcet
//! winner `c` contributes `d` (every mark value) to `c`; otherwise each child
//! label gets exactly one mark value.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::{Caps, RuleError, WinDistribution};
use crate::rational::Rational;
use crate::tournament::{TeamSet, Tournament, MAX_TEAMS};

/// Bracket geometry for `n` teams and arity `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RdsebPlan {
    pub d: usize,
    pub height: u32,
    /// `d^height`, the padded team count.
    pub leaves: usize,
}

impl RdsebPlan {
    pub fn new(n: usize, d: usize) -> Result<Self, RuleError> {
        if d < 2 {
            return Err(RuleError::Domain(format!(
                "bracket arity must be at least 2, got {d}"
            )));
        }
        if n == 0 {
            return Err(RuleError::Domain("no teams".into()));
        }
        let mut height = 0;
        let mut leaves = 1usize;
        while leaves < n {
            leaves = leaves
                .checked_mul(d)
                .ok_or_else(|| RuleError::Domain(format!("bracket for {n} teams overflows")))?;
            height += 1;
        }
        Ok(RdsebPlan { d, height, leaves })
    }

    pub fn inner_nodes(&self) -> usize {
        (self.leaves - 1) / (self.d - 1)
    }
}

pub(crate) fn factorial(m: usize) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, k| acc * k)
}

fn binomial(n: usize, k: usize) -> BigUint {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Unordered partitions of `m` teams into `d` equal blocks.
fn unordered_partitions(m: usize, d: usize) -> BigUint {
    let block = m / d;
    factorial(m) / (factorial(block).pow(d as u32) * factorial(d))
}

/// Number of (subset, partition) evaluations the recursion performs:
/// the sum over levels of C(N, m) times the partitions of an m-set.
pub fn rdseb_required_evaluations(n: usize, d: usize) -> Result<BigUint, RuleError> {
    let plan = RdsebPlan::new(n, d)?;
    let mut total = BigUint::ZERO;
    let mut m = d;
    for _ in 0..plan.height {
        total += binomial(plan.leaves, m) * unordered_partitions(m, d);
        m *= d;
    }
    Ok(total)
}

/// Exact winner distribution; probability on padding teams goes to
/// `dummy_mass`.
pub fn rdseb_exact(t: &Tournament, d: usize, caps: &Caps) -> Result<WinDistribution, RuleError> {
    let n = t.n();
    let plan = RdsebPlan::new(n, d)?;
    let required = rdseb_required_evaluations(n, d)?;
    let infeasible = || RuleError::Infeasible {
        what: format!("rdseb:{d} on {n} teams ({} leaves)", plan.leaves),
        required: required.to_string(),
        cap: caps.subset_states,
    };
    if plan.leaves > MAX_TEAMS || required > BigUint::from(caps.subset_states) {
        return Err(infeasible());
    }
    let padded = t.pad_with_dummies(plan.leaves)?;
    let mut rec = Recursion {
        t: &padded,
        d,
        memo: HashMap::new(),
    };
    let root = rec
        .dist(TeamSet::all(plan.leaves).mask())
        .ok_or_else(infeasible)?;
    let total: u128 = root.iter().map(|&(_, c)| c).sum();
    let total = BigInt::from(total);
    let mut probs = vec![Rational::zero(); n];
    let mut dummy = Rational::zero();
    for &(team, count) in root.iter() {
        let p = Rational::from_big(BigInt::from(count), total.clone());
        if (team as usize) < n {
            probs[team as usize] = p;
        } else {
            dummy += p;
        }
    }
    Ok(WinDistribution::new(probs, dummy))
}

type Counts = Rc<Vec<(u8, u128)>>;

struct Recursion<'a> {
    t: &'a Tournament,
    d: usize,
    memo: HashMap<u64, Counts>,
}

impl Recursion<'_> {
    /// `None` on counter overflow.
    fn dist(&mut self, set: u64) -> Option<Counts> {
        if let Some(hit) = self.memo.get(&set) {
            return Some(hit.clone());
        }
        let m = set.count_ones() as usize;
        if m == 1 {
            let single = Rc::new(vec![(set.trailing_zeros() as u8, 1)]);
            self.memo.insert(set, single.clone());
            return Some(single);
        }
        let block = m / self.d;
        let mut partitions = Vec::new();
        partition_into_blocks(set, block, &mut Vec::new(), &mut partitions);

        let mut acc = [0u128; 64];
        let d = self.d as u128;
        for blocks in &partitions {
            let dists = blocks
                .iter()
                .map(|&b| self.dist(b))
                .collect::<Option<Vec<_>>>()?;
            let mut cursor = vec![0usize; dists.len()];
            'tuples: loop {
                let mut mask = 0u64;
                let mut weight = 1u128;
                for (dist, &k) in dists.iter().zip(&cursor) {
                    let (team, count) = dist[k];
                    mask |= 1 << team;
                    weight = weight.checked_mul(count)?;
                }
                match self.t.condorcet_winner_within(TeamSet::from_mask(mask)) {
                    Some(c) => acc[c] = acc[c].checked_add(weight.checked_mul(d)?)?,
                    None => {
                        for w in TeamSet::from_mask(mask) {
                            acc[w] = acc[w].checked_add(weight)?;
                        }
                    }
                }
                for pos in (0..cursor.len()).rev() {
                    cursor[pos] += 1;
                    if cursor[pos] < dists[pos].len() {
                        continue 'tuples;
                    }
                    cursor[pos] = 0;
                }
                break;
            }
        }
        let counts: Vec<(u8, u128)> = acc
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(team, &c)| (team as u8, c))
            .collect();
        let counts = Rc::new(counts);
        self.memo.insert(set, counts.clone());
        Some(counts)
    }
}

/// Unordered partitions of `set` into blocks of `block` members. Each block
/// is anchored at the lowest remaining member, so every partition appears
/// once.
pub(crate) fn partition_into_blocks(
    set: u64,
    block: usize,
    current: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if set == 0 {
        out.push(current.clone());
        return;
    }
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    for_each_subset(rest, block - 1, &mut |others| {
        current.push(low | others);
        partition_into_blocks(rest & !others, block, current, out);
        current.pop();
    });
}

/// Calls `f` on every `k`-member subset of `mask`.
pub(crate) fn for_each_subset(mask: u64, k: usize, f: &mut dyn FnMut(u64)) {
    fn go(remaining: u64, k: usize, chosen: u64, f: &mut dyn FnMut(u64)) {
        if k == 0 {
            f(chosen);
            return;
        }
        if (remaining.count_ones() as usize) < k {
            return;
        }
        let low = remaining & remaining.wrapping_neg();
        go(remaining & !low, k - 1, chosen | low, f);
        go(remaining & !low, k, chosen, f);
    }
    go(mask, k, 0, f);
}
