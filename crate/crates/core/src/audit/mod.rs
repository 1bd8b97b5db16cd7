//! Exhaustive and sampled verification of rule properties.
//!
//! Every gain comparison uses exact evaluation; sampling only ever chooses
//! *which* scenarios are examined. Exhaustive runs walk tournament indices
//! in parallel chunks and reduce per-chunk results with a fixed tie-break,
//! so their reports do not depend on the worker count.

mod ksnm;
mod masses;
mod properties;

use std::time::Instant;

use serde::Serialize;

use crate::format::to_compact;
use crate::rational::Rational;
use crate::rules::{Rule, RuleError};
use crate::tournament::{pair_count, pair_index, TeamSet, Tournament, TournamentError};

pub use ksnm::{audit_ksnm, exhaustive_scenario_count};
pub use properties::{
    audit_cc, audit_monotone, audit_top_cycle, audit_top_cycle_sampled, bound_check, BoundReport,
    Property, PropertyReport, Violation,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest scenario count an exhaustive k-SNM audit will start.
pub const DEFAULT_MAX_SCENARIOS: u64 = 1_000_000_000;

/// Tournament counts up to this are evaluated once into a table; larger
/// audits evaluate on demand.
pub(crate) const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error("audits need exact evaluation; rule {0} has none")]
    NoExactEval(String),
    #[error("sampled checks need a sampler; rule {0} has none")]
    NoSampler(String),
    #[error("exhaustive {what} needs {required} scenarios, cap is {cap}")]
    Infeasible {
        what: String,
        required: String,
        cap: u64,
    },
    #[error("coalition size {k} invalid for {n} teams (need 2 <= k <= n)")]
    CoalitionSize { k: usize, n: usize },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("evaluating {tournament}: {source}")]
    Evaluation {
        tournament: String,
        #[source]
        source: RuleError,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    /// Worker threads; 0 picks the number of available cores.
    pub threads: usize,
    pub max_scenarios: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            threads: 0,
            max_scenarios: DEFAULT_MAX_SCENARIOS,
        }
    }
}

impl AuditOptions {
    pub fn with_threads(threads: usize) -> Self {
        AuditOptions {
            threads,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditMode {
    Exhaustive,
    /// `scenarios` random (tournament, coalition) draws from `seed`.
    Sampled {
        scenarios: u64,
        seed: u64,
    },
}

impl AuditMode {
    pub fn name(&self) -> &'static str {
        match self {
            AuditMode::Exhaustive => "exhaustive",
            AuditMode::Sampled { .. } => "sampled",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            AuditMode::Exhaustive => None,
            AuditMode::Sampled { seed, .. } => Some(*seed),
        }
    }
}

/// Counters over every exact evaluation an audit performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub evaluations: u64,
    pub nonzero_dummy: u64,
    pub unnormalized: u64,
}

impl EvalStats {
    pub fn record(&mut self, dist: &crate::rules::WinDistribution) {
        self.evaluations += 1;
        if !dist.dummy_mass().is_zero() {
            self.nonzero_dummy += 1;
        }
        if !dist.is_normalized() {
            self.unnormalized += 1;
        }
    }

    pub fn merge(self, other: EvalStats) -> EvalStats {
        EvalStats {
            evaluations: self.evaluations + other.evaluations,
            nonzero_dummy: self.nonzero_dummy + other.nonzero_dummy,
            unnormalized: self.unnormalized + other.unnormalized,
        }
    }

    /// Every evaluation summed to one with no padding mass.
    pub fn clean(&self) -> bool {
        self.nonzero_dummy == 0 && self.unnormalized == 0
    }
}

/// Run metadata that varies between otherwise identical runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Runtime {
    pub wall_time_ms: u64,
    pub threads: usize,
}

/// A base tournament, a coalition, and a variant differing from the base
/// only on matches between coalition members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollusionScenario {
    pub base: Tournament,
    pub coalition: TeamSet,
    pub variant: Tournament,
}

impl CollusionScenario {
    pub fn new(
        base: Tournament,
        coalition: TeamSet,
        variant: Tournament,
    ) -> Result<Self, AuditError> {
        if base.n() != variant.n() {
            return Err(AuditError::Scenario("base and variant sizes differ".into()));
        }
        if coalition.len() < 2 || coalition.iter().any(|i| i >= base.n()) {
            return Err(AuditError::Scenario(format!(
                "coalition {:?} must hold at least two of the {} teams",
                coalition.to_vec(),
                base.n()
            )));
        }
        for i in 0..base.n() {
            for j in i + 1..base.n() {
                let internal = coalition.contains(i) && coalition.contains(j);
                if !internal && base.beats(i, j) != variant.beats(i, j) {
                    return Err(AuditError::Scenario(format!(
                        "match {i}-{j} differs but is not internal to the coalition"
                    )));
                }
            }
        }
        Ok(CollusionScenario {
            base,
            coalition,
            variant,
        })
    }

    pub fn to_json(&self) -> ScenarioJson {
        ScenarioJson {
            base: to_compact(&self.base),
            variant: to_compact(&self.variant),
            coalition: self.coalition.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioJson {
    pub base: String,
    pub variant: String,
    pub coalition: Vec<usize>,
}

/// Recomputes `r_S(variant) - r_S(base)` from scratch.
pub fn replay(rule: &Rule, scenario: &CollusionScenario) -> Result<Rational, AuditError> {
    let eval = |t: &Tournament| {
        rule.exact(t).map_err(|source| AuditError::Evaluation {
            tournament: to_compact(t),
            source,
        })
    };
    let before = eval(&scenario.base)?.mass(scenario.coalition);
    let after = eval(&scenario.variant)?.mass(scenario.coalition);
    Ok(after - before)
}

/// Coverage statement for sampled audits: with probability at least
/// `1 - delta`, scenarios achieving a gain above the reported one make up
/// less than an `epsilon` fraction of the sampling distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub samples: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub note: String,
}

impl Coverage {
    pub fn new(samples: u64, delta: f64) -> Self {
        let epsilon = ((1.0 / delta).ln() / samples as f64).min(1.0);
        Coverage {
            samples,
            delta,
            epsilon,
            note: format!(
                "lower bound only: with confidence {:.2}, scenarios beating the reported gain \
                 have sampling mass below {epsilon:.3e}",
                1.0 - delta
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub rule: String,
    pub n: usize,
    pub k: usize,
    pub mode: AuditMode,
    /// Largest `r_S(T') - r_S(T)` found.
    pub alpha_observed: Rational,
    pub witness: CollusionScenario,
    pub scenarios_checked: u64,
    pub stats: EvalStats,
    pub coverage: Option<Coverage>,
    pub runtime: Runtime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactValue {
    pub rational: Rational,
    pub float: f64,
}

impl From<&Rational> for ExactValue {
    fn from(r: &Rational) -> Self {
        ExactValue {
            rational: r.clone(),
            float: r.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReportJson {
    pub schema_version: u32,
    pub rule: String,
    pub n: usize,
    pub k: usize,
    pub mode: &'static str,
    pub alpha_observed: ExactValue,
    pub witness: ScenarioJson,
    pub scenarios_checked: u64,
    pub seed: Option<u64>,
    pub evaluations: EvalStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Coverage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl AuditReport {
    /// JSON form. Without `timing` the output depends only on the inputs.
    pub fn to_json(&self, timing: bool) -> AuditReportJson {
        AuditReportJson {
            schema_version: SCHEMA_VERSION,
            rule: self.rule.clone(),
            n: self.n,
            k: self.k,
            mode: self.mode.name(),
            alpha_observed: (&self.alpha_observed).into(),
            witness: self.witness.to_json(),
            scenarios_checked: self.scenarios_checked,
            seed: self.mode.seed(),
            evaluations: self.stats,
            coverage: self.coverage.clone(),
            wall_time_ms: timing.then_some(self.runtime.wall_time_ms),
            threads: timing.then_some(self.runtime.threads),
        }
    }

    pub fn to_json_string(&self, timing: bool) -> String {
        serde_json::to_string_pretty(&self.to_json(timing)).expect("report serializes")
    }
}

/// Runs `f` on a pool with `threads` workers (0 = all cores) and reports the
/// elapsed time and resolved worker count.
pub(crate) fn in_pool<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<(T, Runtime), AuditError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AuditError::Pool(e.to_string()))?;
    let start = Instant::now();
    let out = pool.install(f);
    let runtime = Runtime {
        wall_time_ms: start.elapsed().as_millis() as u64,
        threads: pool.current_num_threads(),
    };
    Ok((out, runtime))
}

pub(crate) fn require_exact(rule: &Rule) -> Result<(), AuditError> {
    if rule.has_exact() {
        Ok(())
    } else {
        Err(AuditError::NoExactEval(rule.id().to_string()))
    }
}

/// Where a coalition's internal matches sit in a tournament index.
#[derive(Debug, Clone)]
pub(crate) struct Coalition {
    pub set: TeamSet,
    /// `deposit[v]` is variant `v` spread onto the internal pair bits.
    pub deposit: Vec<u64>,
    pub internal: u64,
}

impl Coalition {
    pub fn new(n: usize, set: TeamSet) -> Self {
        let members = set.to_vec();
        let positions: Vec<usize> = members
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| members[a + 1..].iter().map(move |&j| pair_index(n, i, j)))
            .collect();
        let deposit = (0..1u64 << positions.len())
            .map(|v| {
                positions
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| v >> b & 1 == 1)
                    .fold(0u64, |acc, (_, &p)| acc | 1 << p)
            })
            .collect::<Vec<_>>();
        let internal = *deposit.last().expect("at least one variant");
        Coalition {
            set,
            deposit,
            internal,
        }
    }

    pub fn variants(&self) -> u64 {
        self.deposit.len() as u64
    }

    /// Index of the variant that turns `base` into `base` itself.
    #[cfg(test)]
    pub fn own_variant(&self, index: u64) -> u64 {
        let bits = index & self.internal;
        self.deposit
            .iter()
            .position(|&d| d == bits)
            .expect("every internal pattern is a variant") as u64
    }

    pub fn variant_index(&self, index: u64, variant: u64) -> u64 {
        index & !self.internal | self.deposit[variant as usize]
    }
}

/// Every coalition of size `2..=k` in ascending mask order.
pub(crate) fn coalitions(n: usize, k: usize) -> Vec<Coalition> {
    (0..1u64 << n)
        .map(TeamSet::from_mask)
        .filter(|s| (2..=k).contains(&s.len()))
        .map(|s| Coalition::new(n, s))
        .collect()
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<(), AuditError> {
    if k < 2 || k > n {
        Err(AuditError::CoalitionSize { k, n })
    } else {
        Ok(())
    }
}

pub(crate) fn internal_pairs(k: usize) -> usize {
    pair_count(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::significant_only;
    use crate::structure::fixtures::double_cycle;
    use crate::tournament::variant_of;

    #[test]
    fn coalition_variants_match_variant_of() {
        let n = 5;
        let base = Tournament::from_index(5, 0b10_1101_0011).unwrap();
        let set: TeamSet = [0, 2, 4].into_iter().collect();
        let c = Coalition::new(n, set);
        assert_eq!(c.variants(), 8);
        for v in 0..8 {
            let expected = variant_of(&base, &[0, 2, 4], v);
            let index = c.variant_index(base.index().unwrap(), v);
            assert_eq!(Tournament::from_index(n, index).unwrap(), expected);
        }
        let own = c.own_variant(base.index().unwrap());
        assert_eq!(variant_of(&base, &[0, 2, 4], own), base);
    }

    #[test]
    fn coalition_listing() {
        let cs = coalitions(6, 3);
        assert_eq!(cs.len(), 15 + 20);
        assert!(cs.windows(2).all(|w| w[0].set.mask() < w[1].set.mask()));
    }

    #[test]
    fn scenario_validation() {
        let t = double_cycle();
        let s: TeamSet = [0, 1].into_iter().collect();
        assert!(CollusionScenario::new(t.clone(), s, t.flipped(0, 1)).is_ok());
        assert!(CollusionScenario::new(t.clone(), s, t.flipped(0, 2)).is_err());
        assert!(CollusionScenario::new(t.clone(), TeamSet::singleton(0), t.clone()).is_err());
    }

    #[test]
    fn replay_on_double_cycle() {
        // Team 0 has losses only to 2 and 3; with both throwing, 0 is a
        // Condorcet winner and the triple's mass climbs from 1/2 to 1.
        let t = double_cycle();
        let s: TeamSet = [0, 2, 3].into_iter().collect();
        let v = t.with_result(0, 2).with_result(0, 3);
        let scenario = CollusionScenario::new(t, s, v).unwrap();
        assert_eq!(
            replay(&significant_only(), &scenario).unwrap(),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn coverage_epsilon() {
        let c = Coverage::new(1000, 0.05);
        assert!((c.epsilon - 20f64.ln() / 1000.0).abs() < 1e-12);
    }
}
