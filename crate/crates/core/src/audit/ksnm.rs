use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::masses::{evaluate, with_source, MassSource, SourceVisitor};
use super::{
    check_k, coalitions, in_pool, internal_pairs, require_exact, AuditError, AuditMode,
    AuditOptions, AuditReport, Coalition, CollusionScenario, Coverage, EvalStats,
};
use crate::rational::Rational;
use crate::rules::Rule;
use crate::tournament::{tournament_count, variant_of, TeamSet, Tournament};

const CHUNK: u64 = 512;

/// Sampled mode enumerates every internal orientation up to this many
/// internal matches (k = 4) and falls back to greedy best response beyond.
const FULL_ENUMERATION_PAIRS: usize = 6;

const COVERAGE_DELTA: f64 = 0.05;

/// Scenarios an exhaustive audit examines: every tournament, every
/// coalition of size 2..=k, every orientation of its internal matches.
pub fn exhaustive_scenario_count(n: usize, k: usize) -> Result<u128, AuditError> {
    check_k(n, k)?;
    let tournaments = tournament_count(n)? as u128;
    let per_tournament: u128 = (2..=k)
        .map(|s| binomial(n, s) * (1u128 << internal_pairs(s)))
        .sum();
    Ok(tournaments * per_tournament)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Worst-case coalition gain of `rule` on `n` teams over coalitions of size
/// at most `k`, compared symmetrically over every adjacent pair.
pub fn audit_ksnm(
    rule: &Rule,
    n: usize,
    k: usize,
    mode: AuditMode,
    options: &AuditOptions,
) -> Result<AuditReport, AuditError> {
    require_exact(rule)?;
    check_k(n, k)?;
    match mode {
        AuditMode::Exhaustive => exhaustive(rule, n, k, options),
        AuditMode::Sampled { scenarios, seed } => sampled(rule, n, k, scenarios, seed, options),
    }
}

struct Best<V> {
    gain: V,
    index: u64,
    coalition: usize,
    variant: u64,
}

struct Exhaustive<'a> {
    n: usize,
    coalitions: &'a [Coalition],
}

struct Found {
    gain: Rational,
    index: u64,
    coalition: usize,
    variant: u64,
    stats: EvalStats,
}

impl SourceVisitor for Exhaustive<'_> {
    type Output = Found;

    fn visit<M: MassSource>(self, source: &M) -> Result<Found, AuditError> {
        let count = tournament_count(self.n)?;
        let chunks: Vec<Option<Best<M::Value>>> = (0..count.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| self.chunk(source, c * CHUNK..((c + 1) * CHUNK).min(count)))
            .collect::<Result<_, _>>()?;
        // Chunks are in index order, so keeping the first strict maximum
        // yields the smallest (index, coalition, variant) among ties.
        let mut best: Option<Best<M::Value>> = None;
        for b in chunks.into_iter().flatten() {
            if best.as_ref().is_none_or(|cur| b.gain > cur.gain) {
                best = Some(b);
            }
        }
        let best = best.expect("at least one scenario");
        Ok(Found {
            gain: source.to_rational(&best.gain),
            index: best.index,
            coalition: best.coalition,
            variant: best.variant,
            stats: source.stats(),
        })
    }
}

impl Exhaustive<'_> {
    fn chunk<M: MassSource>(
        &self,
        source: &M,
        range: std::ops::Range<u64>,
    ) -> Result<Option<Best<M::Value>>, AuditError> {
        let mut best: Option<Best<M::Value>> = None;
        for index in range {
            for (ci, c) in self.coalitions.iter().enumerate() {
                let here = source.mass(index, c.set)?;
                let mut top: Option<(M::Value, u64)> = None;
                for v in 0..c.variants() {
                    let m = source.mass(c.variant_index(index, v), c.set)?;
                    if top.as_ref().is_none_or(|(t, _)| m > *t) {
                        top = Some((m, v));
                    }
                }
                let (top, variant) = top.expect("nonempty variant set");
                let gain = top - here;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Best {
                        gain,
                        index,
                        coalition: ci,
                        variant,
                    });
                }
            }
        }
        Ok(best)
    }
}

fn exhaustive(
    rule: &Rule,
    n: usize,
    k: usize,
    options: &AuditOptions,
) -> Result<AuditReport, AuditError> {
    let scenarios = exhaustive_scenario_count(n, k)?;
    if scenarios > options.max_scenarios as u128 {
        return Err(AuditError::Infeasible {
            what: format!("k-SNM audit at n={n}, k={k}"),
            required: scenarios.to_string(),
            cap: options.max_scenarios,
        });
    }
    let cs = coalitions(n, k);
    let (found, runtime) = in_pool(options.threads, || {
        with_source(rule, n, Exhaustive { n, coalitions: &cs })
    })?;
    let found = found?;
    let c = &cs[found.coalition];
    let witness = CollusionScenario {
        base: Tournament::from_index(n, found.index)?,
        coalition: c.set,
        variant: Tournament::from_index(n, c.variant_index(found.index, found.variant))?,
    };
    Ok(AuditReport {
        rule: rule.id().to_string(),
        n,
        k,
        mode: AuditMode::Exhaustive,
        alpha_observed: found.gain,
        witness,
        scenarios_checked: scenarios as u64,
        stats: found.stats,
        coverage: None,
        runtime,
    })
}

struct TaskResult {
    task: u64,
    gain: Rational,
    scenario: CollusionScenario,
    scenarios: u64,
    stats: EvalStats,
}

impl TaskResult {
    /// Higher gain wins; equal gains go to the earlier task.
    fn better(self, other: TaskResult) -> TaskResult {
        let stats = self.stats.merge(other.stats);
        let scenarios = self.scenarios + other.scenarios;
        let (gain_a, gain_b) = (&self.gain, &other.gain);
        let mut keep = if gain_a > gain_b || (gain_a == gain_b && self.task < other.task) {
            self
        } else {
            other
        };
        keep.stats = stats;
        keep.scenarios = scenarios;
        keep
    }
}

fn sampled(
    rule: &Rule,
    n: usize,
    k: usize,
    scenarios: u64,
    seed: u64,
    options: &AuditOptions,
) -> Result<AuditReport, AuditError> {
    if scenarios == 0 {
        return Err(AuditError::Scenario(
            "sampled audit needs at least one scenario".into(),
        ));
    }
    let (best, runtime) = in_pool(options.threads, || {
        (0..scenarios)
            .into_par_iter()
            .map(|task| sample_task(rule, n, k, seed, task))
            .try_reduce_with(|a, b| Ok(a.better(b)))
    })?;
    let best = best.expect("at least one task")?;
    Ok(AuditReport {
        rule: rule.id().to_string(),
        n,
        k,
        mode: AuditMode::Sampled { scenarios, seed },
        alpha_observed: best.gain,
        witness: best.scenario,
        scenarios_checked: best.scenarios,
        stats: best.stats,
        coverage: Some(Coverage::new(scenarios, COVERAGE_DELTA)),
        runtime,
    })
}

/// The RNG for sampled task `task`: one ChaCha stream per task, so results
/// do not depend on scheduling.
pub(crate) fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn sample_task(
    rule: &Rule,
    n: usize,
    k: usize,
    seed: u64,
    task: u64,
) -> Result<TaskResult, AuditError> {
    let mut rng = task_rng(seed, task);
    let base = Tournament::random(n, &mut rng)?;
    let mut members = rand::seq::index::sample(&mut rng, n, k).into_vec();
    members.sort_unstable();
    let set: TeamSet = members.iter().copied().collect();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .collect();
    let own = pairs
        .iter()
        .enumerate()
        .filter(|&(_, &(a, b))| base.beats(members[a], members[b]))
        .fold(0u64, |acc, (p, _)| acc | 1 << p);
    let mut stats = EvalStats::default();
    let mut eval = |v: u64| -> Result<_, AuditError> {
        let d = evaluate(rule, &variant_of(&base, &members, v))?;
        stats.record(&d);
        Ok(d)
    };

    let mut best: Option<(Rational, TeamSet, u64)> = None;
    let mut checked = 0u64;
    if pairs.len() <= FULL_ENUMERATION_PAIRS {
        let dists = (0..1u64 << pairs.len())
            .map(&mut eval)
            .collect::<Result<Vec<_>, _>>()?;
        // Every sub-coalition of size >= 2, in ascending team-mask order.
        let mut subs: Vec<u64> = (0..1u64 << k).filter(|s| s.count_ones() >= 2).collect();
        subs.sort_by_key(|&s| member_set(&members, s).mask());
        for sub in subs {
            let sub_set = member_set(&members, sub);
            let free = pairs
                .iter()
                .enumerate()
                .filter(|&(_, &(a, b))| sub >> a & 1 == 1 && sub >> b & 1 == 1)
                .fold(0u64, |acc, (p, _)| acc | 1 << p);
            let here = dists[own as usize].mass(sub_set);
            let mut top: Option<(Rational, u64)> = None;
            for v in (0..dists.len() as u64).filter(|v| v & !free == own & !free) {
                checked += 1;
                let m = dists[v as usize].mass(sub_set);
                if top.as_ref().is_none_or(|(t, _)| m > *t) {
                    top = Some((m, v));
                }
            }
            let (top, v) = top.expect("own variant is a candidate");
            let gain = top - &here;
            if best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                best = Some((gain, sub_set, v));
            }
        }
    } else {
        // Greedy best response: flip internal matches while the coalition's
        // mass strictly rises.
        let mut memo: HashMap<u64, Rational> = HashMap::new();
        let mut mass = |v: u64| -> Result<Rational, AuditError> {
            if let Some(m) = memo.get(&v) {
                return Ok(m.clone());
            }
            let m = eval(v)?.mass(set);
            memo.insert(v, m.clone());
            Ok(m)
        };
        let start = mass(own)?;
        let (mut v, mut current) = (own, start.clone());
        loop {
            let mut improved = false;
            for p in 0..pairs.len() {
                let w = v ^ 1 << p;
                let m = mass(w)?;
                if m > current {
                    v = w;
                    current = m;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        checked = memo.len() as u64;
        best = Some((current - start, set, v));
    }
    let (gain, coalition, v) = best.expect("at least one sub-coalition");
    let scenario = CollusionScenario {
        variant: variant_of(&base, &members, v),
        base,
        coalition,
    };
    Ok(TaskResult {
        task,
        gain,
        scenario,
        scenarios: checked,
        stats,
    })
}

fn member_set(members: &[usize], sub: u64) -> TeamSet {
    members
        .iter()
        .enumerate()
        .filter(|&(a, _)| sub >> a & 1 == 1)
        .map(|(_, &m)| m)
        .collect()
}
