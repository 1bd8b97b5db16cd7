//! Tournament rules: maps from a tournament to a distribution over winners.
//!
//! A [`Rule`] carries an exact evaluator, a sampler, or both. Exact outputs
//! are [`WinDistribution`]s over exact rationals. Stable rule ids:
//! `uniform`, `top-cycle`, `significant-only`, `rdseb:<d>`,
//! `ext:<base-id>:<base-n>`, plus `match-winner` (two teams only).

mod bounds;
pub mod bracket;
mod ext;
mod rdseb;
mod significant;
mod simple;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::Serialize;

use crate::rational::Rational;
use crate::tournament::{TeamSet, Tournament, TournamentError};

pub use bounds::{alpha_bound, ext_alpha_bound, falling_factorial};
pub use bracket::{brute_force_rdseb, sample_bracket, Bracket, SampledBracket};
pub use ext::{ext_partition_count, extend_rule, finalist_levels};
pub use rdseb::{rdseb_exact, rdseb_required_evaluations, RdsebPlan};
pub use significant::significant_only;
pub use simple::{match_winner, topcycle_rule, uniform_rule};

/// Smallest team count the significant-only rule is defined for.
pub const SIGNIFICANT_ONLY_MIN_TEAMS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule undefined below {min} teams (got {n})")]
    UndefinedBelow { min: usize, n: usize },
    #[error("rule {rule} is defined on exactly {expected} teams, got {n}")]
    WrongTeamCount {
        rule: String,
        expected: usize,
        n: usize,
    },
    #[error("exact evaluation infeasible: {what} needs {required} evaluations, cap is {cap}")]
    Infeasible {
        what: String,
        required: String,
        cap: u64,
    },
    #[error("rule {0} has no exact evaluator")]
    NoExactEval(String),
    #[error("rule {0} has neither an exact evaluator nor a sampler")]
    NoEvaluator(String),
    #[error("unknown rule id {0:?}")]
    UnknownRule(String),
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// Feasibility caps for exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Subset evaluations allowed in the bracket partition recursion.
    pub subset_states: u64,
    /// Unordered group partitions allowed in the extension rule.
    pub partitions: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            subset_states: 2_000_000,
            partitions: 100_000,
        }
    }
}

/// Exact winner distribution over the real teams, with the probability of a
/// padding team winning tracked separately.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WinDistribution {
    probs: Vec<Rational>,
    dummy_mass: Rational,
}

impl WinDistribution {
    pub fn new(probs: Vec<Rational>, dummy_mass: Rational) -> Self {
        WinDistribution { probs, dummy_mass }
    }

    pub fn from_probs(probs: Vec<Rational>) -> Self {
        Self::new(probs, Rational::zero())
    }

    /// All mass on `winner`.
    pub fn point(n: usize, winner: usize) -> Self {
        let mut probs = vec![Rational::zero(); n];
        probs[winner] = Rational::one();
        Self::from_probs(probs)
    }

    /// Uniform over `support` (nonempty).
    pub fn uniform_over(n: usize, support: TeamSet) -> Self {
        let share = Rational::new(1, support.len() as i64);
        let probs = (0..n)
            .map(|i| {
                if support.contains(i) {
                    share.clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Self::from_probs(probs)
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, team: usize) -> &Rational {
        &self.probs[team]
    }

    pub fn dummy_mass(&self) -> &Rational {
        &self.dummy_mass
    }

    /// r_S: total probability on `set`.
    pub fn mass(&self, set: TeamSet) -> Rational {
        set.iter().map(|i| &self.probs[i]).sum()
    }

    /// Teams with positive probability.
    pub fn support(&self) -> TeamSet {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum::<Rational>() + &self.dummy_mass
    }

    /// Nonnegative entries summing to exactly one.
    pub fn is_normalized(&self) -> bool {
        !self.dummy_mass.is_negative()
            && self.probs.iter().all(|p| !p.is_negative())
            && self.total().is_one()
    }

    pub fn floats(&self) -> Vec<f64> {
        self.probs.iter().map(Rational::to_f64).collect()
    }

    /// Draws a winner; returns `n()` when a dummy wins. Exact: the draw is a
    /// uniform integer below the common denominator.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let denom = self
            .probs
            .iter()
            .chain(std::iter::once(&self.dummy_mass))
            .fold(BigInt::from(1), |acc, p| acc.lcm(p.denom()));
        let scaled: Vec<BigInt> = self
            .probs
            .iter()
            .map(|p| p.numer() * (&denom / p.denom()))
            .collect();
        let draw = match denom.to_u64() {
            Some(d) => BigInt::from(rng.random_range(0..d)),
            None => {
                // Rejection sampling over enough random bits.
                let bits = denom.bits();
                loop {
                    let mut candidate = BigInt::zero();
                    for _ in 0..bits.div_ceil(64) {
                        candidate = (candidate << 64) + BigInt::from(rng.next_u64());
                    }
                    candidate %= BigInt::from(1) << bits;
                    if candidate < denom {
                        break candidate;
                    }
                }
            }
        };
        let mut acc = BigInt::zero();
        for (i, s) in scaled.iter().enumerate() {
            acc += s;
            if draw < acc {
                return i;
            }
        }
        self.n()
    }

    pub fn to_json(&self) -> DistributionJson {
        DistributionJson {
            probs: self.probs.clone(),
            dummy_mass: self.dummy_mass.clone(),
            floats: self.floats(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistributionJson {
    pub probs: Vec<Rational>,
    pub dummy_mass: Rational,
    pub floats: Vec<f64>,
}

pub type ExactFn = dyn Fn(&Tournament) -> Result<WinDistribution, RuleError> + Send + Sync;
/// Returns the winner's index; any index `>= n` denotes a padding team.
pub type SampleFn = dyn Fn(&Tournament, &mut dyn RngCore) -> Result<usize, RuleError> + Send + Sync;

/// A tournament rule. Immutable and cheap to clone; safe to share across
/// workers.
#[derive(Clone)]
pub struct Rule {
    id: String,
    exact: Option<Arc<ExactFn>>,
    sampler: Option<Arc<SampleFn>>,
    anonymous: bool,
}

impl Rule {
    pub fn new(
        id: impl Into<String>,
        exact: Option<Arc<ExactFn>>,
        sampler: Option<Arc<SampleFn>>,
    ) -> Result<Self, RuleError> {
        let id = id.into();
        if exact.is_none() && sampler.is_none() {
            return Err(RuleError::NoEvaluator(id));
        }
        Ok(Rule {
            id,
            exact,
            sampler,
            anonymous: false,
        })
    }

    /// Rule with only an exact evaluator.
    pub fn from_exact(
        id: impl Into<String>,
        f: impl Fn(&Tournament) -> Result<WinDistribution, RuleError> + Send + Sync + 'static,
    ) -> Self {
        Rule {
            id: id.into(),
            exact: Some(Arc::new(f)),
            sampler: None,
            anonymous: false,
        }
    }

    /// Declares that relabeling teams permutes the output the same way.
    /// Lets the extension rule skip averaging over finalist orderings.
    pub fn with_anonymous(mut self, anonymous: bool) -> Self {
        self.anonymous = anonymous;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_anonymous(&self) -> bool {
        self.anonymous
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn exact(&self, t: &Tournament) -> Result<WinDistribution, RuleError> {
        match &self.exact {
            Some(f) => f(t),
            None => Err(RuleError::NoExactEval(self.id.clone())),
        }
    }

    /// Samples a winner, through the sampler when present and otherwise by
    /// drawing from the exact distribution. Indices `>= t.n()` are dummies.
    pub fn sample(&self, t: &Tournament, rng: &mut dyn RngCore) -> Result<usize, RuleError> {
        match (&self.sampler, &self.exact) {
            (Some(s), _) => s(t, rng),
            (None, Some(e)) => Ok(e(t)?.sample(rng)),
            (None, None) => Err(RuleError::NoEvaluator(self.id.clone())),
        }
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("id", &self.id)
            .field("exact", &self.exact.is_some())
            .field("sampler", &self.sampler.is_some())
            .finish()
    }
}

/// Parsed rule id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleId {
    Uniform,
    TopCycle,
    SignificantOnly,
    MatchWinner,
    Rdseb(usize),
    Ext { base: Box<RuleId>, base_n: usize },
}

impl std::str::FromStr for RuleId {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, RuleError> {
        let unknown = || RuleError::UnknownRule(s.to_string());
        match s {
            "uniform" => return Ok(RuleId::Uniform),
            "top-cycle" => return Ok(RuleId::TopCycle),
            "significant-only" => return Ok(RuleId::SignificantOnly),
            "match-winner" => return Ok(RuleId::MatchWinner),
            _ => {}
        }
        if let Some(d) = s.strip_prefix("rdseb:") {
            let d: usize = d.parse().map_err(|_| unknown())?;
            if d < 2 {
                return Err(RuleError::Domain(format!(
                    "bracket arity must be at least 2, got {d}"
                )));
            }
            return Ok(RuleId::Rdseb(d));
        }
        if let Some(rest) = s.strip_prefix("ext:") {
            let (base, base_n) = rest.rsplit_once(':').ok_or_else(unknown)?;
            let base_n: usize = base_n.parse().map_err(|_| unknown())?;
            return Ok(RuleId::Ext {
                base: Box::new(base.parse()?),
                base_n,
            });
        }
        Err(unknown())
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::Uniform => f.write_str("uniform"),
            RuleId::TopCycle => f.write_str("top-cycle"),
            RuleId::SignificantOnly => f.write_str("significant-only"),
            RuleId::MatchWinner => f.write_str("match-winner"),
            RuleId::Rdseb(d) => write!(f, "rdseb:{d}"),
            RuleId::Ext { base, base_n } => write!(f, "ext:{base}:{base_n}"),
        }
    }
}

impl RuleId {
    /// Instantiates the rule for tournaments on `n` teams.
    pub fn build(&self, n: usize, caps: &Caps) -> Result<Rule, RuleError> {
        Ok(match self {
            RuleId::Uniform => uniform_rule(),
            RuleId::TopCycle => topcycle_rule(),
            RuleId::SignificantOnly => {
                if n < SIGNIFICANT_ONLY_MIN_TEAMS {
                    return Err(RuleError::UndefinedBelow {
                        min: SIGNIFICANT_ONLY_MIN_TEAMS,
                        n,
                    });
                }
                significant_only()
            }
            RuleId::MatchWinner => {
                if n != 2 {
                    return Err(RuleError::WrongTeamCount {
                        rule: self.to_string(),
                        expected: 2,
                        n,
                    });
                }
                match_winner()
            }
            RuleId::Rdseb(d) => rdseb(*d, *caps)?,
            RuleId::Ext { base, base_n } => {
                let base_rule = base.build(*base_n, caps)?;
                extend_rule(base_rule, *base_n, n, caps)?
            }
        })
    }
}

/// Parses `id` and instantiates it for `n` teams with default caps.
pub fn build_rule(id: &str, n: usize) -> Result<Rule, RuleError> {
    id.parse::<RuleId>()?.build(n, &Caps::default())
}

/// Randomized d-ary single-elimination bracket with an exact evaluator
/// (partition recursion) and a bracket sampler.
pub fn rdseb(d: usize, caps: Caps) -> Result<Rule, RuleError> {
    if d < 2 {
        return Err(RuleError::Domain(format!(
            "bracket arity must be at least 2, got {d}"
        )));
    }
    Ok(Rule {
        id: format!("rdseb:{d}"),
        exact: Some(Arc::new(move |t: &Tournament| rdseb_exact(t, d, &caps))),
        sampler: Some(Arc::new(move |t: &Tournament, rng: &mut dyn RngCore| {
            Ok(sample_bracket(t, d, rng)?.winner)
        })),
        anonymous: true,
    })
}
