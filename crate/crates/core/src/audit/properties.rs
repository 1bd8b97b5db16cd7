use rayon::prelude::*;
use serde::Serialize;

use super::ksnm::{audit_ksnm, task_rng};
use super::masses::{with_source, MassSource, SourceVisitor};
use super::{
    in_pool, require_exact, AuditError, AuditMode, AuditOptions, AuditReport, AuditReportJson,
    EvalStats, Runtime, SCHEMA_VERSION,
};
use crate::format::to_compact;
use crate::rational::Rational;
use crate::rules::Rule;
use crate::tournament::{pair_index, tournament_count, TeamSet, Tournament};

const CHUNK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    CondorcetConsistent,
    Monotone,
    TopCycleConsistent,
}

/// A counterexample to an audited property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub tournament: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub team: Option<usize>,
    pub expected: String,
    pub observed: String,
}

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub property: Property,
    pub rule: String,
    pub n: usize,
    pub mode: &'static str,
    pub tournaments: u64,
    /// Individual assertions evaluated.
    pub checks: u64,
    pub violation: Option<Violation>,
    pub seed: Option<u64>,
    pub stats: EvalStats,
    pub runtime: Runtime,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReportJson {
    pub schema_version: u32,
    pub property: Property,
    pub rule: String,
    pub n: usize,
    pub mode: &'static str,
    pub passed: bool,
    pub tournaments: u64,
    pub checks: u64,
    pub violation: Option<Violation>,
    pub seed: Option<u64>,
    pub evaluations: EvalStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    pub fn to_json(&self, timing: bool) -> PropertyReportJson {
        PropertyReportJson {
            schema_version: SCHEMA_VERSION,
            property: self.property,
            rule: self.rule.clone(),
            n: self.n,
            mode: self.mode,
            passed: self.passed(),
            tournaments: self.tournaments,
            checks: self.checks,
            violation: self.violation.clone(),
            seed: self.seed,
            evaluations: self.stats,
            wall_time_ms: timing.then_some(self.runtime.wall_time_ms),
            threads: timing.then_some(self.runtime.threads),
        }
    }

    pub fn to_json_string(&self, timing: bool) -> String {
        serde_json::to_string_pretty(&self.to_json(timing)).expect("report serializes")
    }
}

/// Per-tournament check run over every index; returns the number of
/// assertions made and the first violation.
trait IndexCheck: Sync {
    fn check<M: MassSource>(
        &self,
        source: &M,
        t: &Tournament,
        index: u64,
    ) -> Result<(u64, Option<Violation>), AuditError>;
}

struct Sweep<'a, C> {
    n: usize,
    check: &'a C,
}

struct SweepResult {
    checks: u64,
    violation: Option<Violation>,
    stats: EvalStats,
}

impl<C: IndexCheck> SourceVisitor for Sweep<'_, C> {
    type Output = SweepResult;

    fn visit<M: MassSource>(self, source: &M) -> Result<SweepResult, AuditError> {
        let count = tournament_count(self.n)?;
        let chunks: Vec<(u64, Option<Violation>)> = (0..count.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut checks = 0;
                let mut first = None;
                for index in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    let t = Tournament::from_index(self.n, index)?;
                    let (k, v) = self.check.check(source, &t, index)?;
                    checks += k;
                    if first.is_none() {
                        first = v;
                    }
                }
                Ok::<_, AuditError>((checks, first))
            })
            .collect::<Result<_, _>>()?;
        let checks = chunks.iter().map(|c| c.0).sum();
        let violation = chunks.into_iter().find_map(|c| c.1);
        Ok(SweepResult {
            checks,
            violation,
            stats: source.stats(),
        })
    }
}

fn sweep<C: IndexCheck>(
    rule: &Rule,
    n: usize,
    property: Property,
    check: &C,
    options: &AuditOptions,
) -> Result<PropertyReport, AuditError> {
    require_exact(rule)?;
    let tournaments = tournament_count(n)?;
    let (result, runtime) = in_pool(options.threads, || with_source(rule, n, Sweep { n, check }))?;
    let result = result?;
    Ok(PropertyReport {
        property,
        rule: rule.id().to_string(),
        n,
        mode: "exhaustive",
        tournaments,
        checks: result.checks,
        violation: result.violation,
        seed: None,
        stats: result.stats,
        runtime,
    })
}

struct Monotone;

impl IndexCheck for Monotone {
    fn check<M: MassSource>(
        &self,
        source: &M,
        t: &Tournament,
        index: u64,
    ) -> Result<(u64, Option<Violation>), AuditError> {
        let n = t.n();
        let mut checks = 0;
        for i in 0..n {
            let team = TeamSet::singleton(i);
            let before = source.mass(index, team)?;
            for j in t.wins(i) {
                checks += 1;
                let flipped = index ^ 1 << pair_index(n, i.min(j), i.max(j));
                let after = source.mass(flipped, team)?;
                if after > before {
                    let variant = Tournament::from_index(n, flipped)?;
                    return Ok((
                        checks,
                        Some(Violation {
                            tournament: to_compact(t),
                            variant: Some(to_compact(&variant)),
                            team: Some(i),
                            expected: format!("at most {}", source.to_rational(&before)),
                            observed: source.to_rational(&after).to_string(),
                        }),
                    ));
                }
            }
        }
        Ok((checks, None))
    }
}

/// Single-flip monotonicity: no team raises its own probability by losing
/// a match it won. Chains of flips follow by transitivity.
pub fn audit_monotone(
    rule: &Rule,
    n: usize,
    options: &AuditOptions,
) -> Result<PropertyReport, AuditError> {
    sweep(rule, n, Property::Monotone, &Monotone, options)
}

struct Condorcet;

impl IndexCheck for Condorcet {
    fn check<M: MassSource>(
        &self,
        source: &M,
        t: &Tournament,
        index: u64,
    ) -> Result<(u64, Option<Violation>), AuditError> {
        let Some(w) = t.condorcet_winner() else {
            return Ok((0, None));
        };
        let p = source.to_rational(&source.mass(index, TeamSet::singleton(w))?);
        let violation = (!p.is_one()).then(|| Violation {
            tournament: to_compact(t),
            variant: None,
            team: Some(w),
            expected: "1/1".into(),
            observed: p.to_string(),
        });
        Ok((1, violation))
    }
}

/// Every Condorcet winner on `n` teams is selected with probability one.
pub fn audit_cc(
    rule: &Rule,
    n: usize,
    options: &AuditOptions,
) -> Result<PropertyReport, AuditError> {
    sweep(rule, n, Property::CondorcetConsistent, &Condorcet, options)
}

struct TopCycle;

impl IndexCheck for TopCycle {
    fn check<M: MassSource>(
        &self,
        source: &M,
        t: &Tournament,
        index: u64,
    ) -> Result<(u64, Option<Violation>), AuditError> {
        let p = source.to_rational(&source.mass(index, t.top_cycle())?);
        let violation = (!p.is_one()).then(|| Violation {
            tournament: to_compact(t),
            variant: None,
            team: None,
            expected: "top-cycle mass 1/1".into(),
            observed: format!("top-cycle mass {p}"),
        });
        Ok((1, violation))
    }
}

/// All winning probability (padding included) lies in the top cycle, on
/// every tournament with `n` teams.
pub fn audit_top_cycle(
    rule: &Rule,
    n: usize,
    options: &AuditOptions,
) -> Result<PropertyReport, AuditError> {
    sweep(rule, n, Property::TopCycleConsistent, &TopCycle, options)
}

/// Draws `tournaments` random tournaments on `n` teams and `samples` winners
/// for each from the rule's sampler; any winner outside the top cycle fails.
/// Tournament `i` uses RNG stream `i` of `seed`.
pub fn audit_top_cycle_sampled(
    rule: &Rule,
    n: usize,
    tournaments: u64,
    samples: u64,
    seed: u64,
    options: &AuditOptions,
) -> Result<PropertyReport, AuditError> {
    if !rule.has_sampler() && !rule.has_exact() {
        return Err(AuditError::NoSampler(rule.id().to_string()));
    }
    let (found, runtime) = in_pool(options.threads, || {
        (0..tournaments)
            .into_par_iter()
            .map(|task| {
                let mut rng = task_rng(seed, task);
                let t = Tournament::random(n, &mut rng)?;
                let cycle = t.top_cycle();
                for _ in 0..samples {
                    let w = rule.sample(&t, &mut rng)?;
                    if w >= n || !cycle.contains(w) {
                        return Ok(Some(Violation {
                            tournament: to_compact(&t),
                            variant: None,
                            team: Some(w),
                            expected: format!("winner in {:?}", cycle.to_vec()),
                            observed: if w >= n {
                                format!("padding team {w} (task {task}, seed {seed})")
                            } else {
                                format!("team {w} (task {task}, seed {seed})")
                            },
                        }));
                    }
                }
                Ok::<_, AuditError>(None)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let violation = found?.into_iter().flatten().next();
    Ok(PropertyReport {
        property: Property::TopCycleConsistent,
        rule: rule.id().to_string(),
        n,
        mode: "sampled",
        tournaments,
        checks: tournaments * samples,
        violation,
        seed: Some(seed),
        stats: EvalStats::default(),
        runtime,
    })
}

/// A k-SNM audit compared against a claimed bound.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub bound: Rational,
    pub audit: AuditReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReportJson {
    pub bound: Rational,
    pub holds: bool,
    /// alpha_observed / bound, as an empirical tightness probe.
    pub ratio: f64,
    #[serde(flatten)]
    pub audit: AuditReportJson,
}

impl BoundReport {
    /// No observed gain exceeds the bound.
    pub fn holds(&self) -> bool {
        self.audit.alpha_observed <= self.bound
    }

    pub fn to_json(&self, timing: bool) -> BoundReportJson {
        BoundReportJson {
            bound: self.bound.clone(),
            holds: self.holds(),
            ratio: if self.bound.is_zero() {
                0.0
            } else {
                (&self.audit.alpha_observed / &self.bound).to_f64()
            },
            audit: self.audit.to_json(timing),
        }
    }
}

/// Witness search (exhaustive or sampled) checked against `bound`. The
/// observed maximum is a lower bound on the rule's true constant.
pub fn bound_check(
    rule: &Rule,
    n: usize,
    k: usize,
    bound: &Rational,
    mode: AuditMode,
    options: &AuditOptions,
) -> Result<BoundReport, AuditError> {
    let audit = audit_ksnm(rule, n, k, mode, options)?;
    Ok(BoundReport {
        bound: bound.clone(),
        audit,
    })
}
