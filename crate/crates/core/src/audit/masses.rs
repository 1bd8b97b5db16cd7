//! Coalition masses `r_S(T)` looked up by tournament index.
//!
//! Small audits evaluate every tournament once. When all denominators share
//! a common multiple that fits in 64 bits the table is rescaled to integers,
//! which keeps the inner loops free of big-number arithmetic.

use std::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{AuditError, EvalStats, TABLE_LIMIT};
use crate::format::to_compact;
use crate::rational::Rational;
use crate::rules::{Rule, WinDistribution};
use crate::tournament::{tournament_count, TeamSet, Tournament};

pub(crate) trait MassSource: Sync {
    type Value: Ord + Clone + Send + Sub<Output = Self::Value>;

    fn mass(&self, index: u64, set: TeamSet) -> Result<Self::Value, AuditError>;

    fn to_rational(&self, value: &Self::Value) -> Rational;

    fn stats(&self) -> EvalStats;
}

pub(crate) fn evaluate(rule: &Rule, t: &Tournament) -> Result<WinDistribution, AuditError> {
    rule.exact(t).map_err(|source| AuditError::Evaluation {
        tournament: to_compact(t),
        source,
    })
}

pub(crate) struct ExactTable {
    dists: Vec<WinDistribution>,
    stats: EvalStats,
}

impl ExactTable {
    pub fn build(rule: &Rule, n: usize) -> Result<Self, AuditError> {
        let count = tournament_count(n)?;
        let dists = (0..count)
            .into_par_iter()
            .map(|index| evaluate(rule, &Tournament::from_index(n, index)?))
            .collect::<Result<Vec<_>, _>>()?;
        let mut stats = EvalStats::default();
        for d in &dists {
            stats.record(d);
        }
        Ok(ExactTable { dists, stats })
    }

    /// Integer form when every probability is a multiple of `1/L` for some
    /// `L < 2^64`.
    pub fn scaled(&self) -> Option<ScaledTable> {
        let mut lcm = BigInt::from(1);
        for d in &self.dists {
            for p in d.probs() {
                lcm = lcm.lcm(p.denom());
            }
        }
        let denom = lcm.to_u64()?;
        let n = self.dists.first().map_or(0, WinDistribution::n);
        let mut nums = Vec::with_capacity(self.dists.len() * n);
        for d in &self.dists {
            for p in d.probs() {
                nums.push((p.numer() * (&lcm / p.denom())).to_u64()?);
            }
        }
        Some(ScaledTable {
            n,
            denom,
            nums,
            stats: self.stats,
        })
    }
}

impl MassSource for ExactTable {
    type Value = Rational;

    fn mass(&self, index: u64, set: TeamSet) -> Result<Rational, AuditError> {
        Ok(self.dists[index as usize].mass(set))
    }

    fn to_rational(&self, value: &Rational) -> Rational {
        value.clone()
    }

    fn stats(&self) -> EvalStats {
        self.stats
    }
}

pub(crate) struct ScaledTable {
    n: usize,
    denom: u64,
    nums: Vec<u64>,
    stats: EvalStats,
}

impl MassSource for ScaledTable {
    type Value = u128;

    fn mass(&self, index: u64, set: TeamSet) -> Result<u128, AuditError> {
        let row = &self.nums[index as usize * self.n..][..self.n];
        Ok(set.iter().map(|i| row[i] as u128).sum())
    }

    fn to_rational(&self, value: &u128) -> Rational {
        Rational::from_big(BigInt::from(*value), BigInt::from(self.denom))
    }

    fn stats(&self) -> EvalStats {
        self.stats
    }
}

/// Evaluates the rule on every lookup.
pub(crate) struct Live<'a> {
    rule: &'a Rule,
    n: usize,
    evaluations: AtomicU64,
    nonzero_dummy: AtomicU64,
    unnormalized: AtomicU64,
}

impl<'a> Live<'a> {
    pub fn new(rule: &'a Rule, n: usize) -> Self {
        Live {
            rule,
            n,
            evaluations: AtomicU64::new(0),
            nonzero_dummy: AtomicU64::new(0),
            unnormalized: AtomicU64::new(0),
        }
    }
}

impl MassSource for Live<'_> {
    type Value = Rational;

    fn mass(&self, index: u64, set: TeamSet) -> Result<Rational, AuditError> {
        let d = evaluate(self.rule, &Tournament::from_index(self.n, index)?)?;
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        if !d.dummy_mass().is_zero() {
            self.nonzero_dummy.fetch_add(1, Ordering::Relaxed);
        }
        if !d.is_normalized() {
            self.unnormalized.fetch_add(1, Ordering::Relaxed);
        }
        Ok(d.mass(set))
    }

    fn to_rational(&self, value: &Rational) -> Rational {
        value.clone()
    }

    fn stats(&self) -> EvalStats {
        EvalStats {
            evaluations: self.evaluations.load(Ordering::Relaxed),
            nonzero_dummy: self.nonzero_dummy.load(Ordering::Relaxed),
            unnormalized: self.unnormalized.load(Ordering::Relaxed),
        }
    }
}

/// Calls `f` with the cheapest source available for `rule` on `n` teams.
/// Must run inside the audit's thread pool.
pub(crate) fn with_source<R>(
    rule: &Rule,
    n: usize,
    f: impl SourceVisitor<Output = R>,
) -> Result<R, AuditError> {
    if tournament_count(n)? <= TABLE_LIMIT {
        let table = ExactTable::build(rule, n)?;
        match table.scaled() {
            Some(scaled) => f.visit(&scaled),
            None => f.visit(&table),
        }
    } else {
        f.visit(&Live::new(rule, n))
    }
}

/// A computation generic over the mass representation.
pub(crate) trait SourceVisitor {
    type Output;
    fn visit<M: MassSource>(self, source: &M) -> Result<Self::Output, AuditError>;
}
