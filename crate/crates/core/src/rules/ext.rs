//! Scaling a rule for `n` teams to more teams.
//!
//! Pad with dummies up to `n^d` (smallest sufficient `d`), split the padded
//! teams uniformly at random into `n` groups of `n^(d-1)`, draw one finalist
//! per group uniformly from the group's top cycle, and run the base rule on
//! the finalists.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::RngCore;

use super::rdseb::{factorial, partition_into_blocks};
use super::simple::pick;
use super::{Caps, Rule, RuleError, WinDistribution};
use crate::rational::Rational;
use crate::tournament::{TeamSet, Tournament, TournamentError, MAX_TEAMS};

/// Smallest `d` with `base_n^d >= target_n`, and `base_n^d`.
pub fn finalist_levels(base_n: usize, target_n: usize) -> Result<(u32, usize), RuleError> {
    if base_n < 2 {
        return Err(RuleError::Domain(format!(
            "base rule needs at least 2 teams, got {base_n}"
        )));
    }
    let mut d = 1;
    let mut padded = base_n;
    while padded < target_n {
        padded = padded
            .checked_mul(base_n)
            .ok_or_else(|| RuleError::Domain(format!("padding {target_n} teams overflows")))?;
        d += 1;
    }
    Ok((d, padded))
}

/// Unordered ways to split `padded` teams into `groups` equal groups.
pub fn ext_partition_count(padded: usize, groups: usize) -> BigUint {
    let size = padded / groups;
    factorial(padded) / (factorial(size).pow(groups as u32) * factorial(groups))
}

/// The extension of `base` (defined on `base_n` teams) to `target_n` teams.
///
/// The returned rule always samples. It evaluates exactly only when `base`
/// does and the number of unordered group partitions is within
/// `caps.partitions`.
pub fn extend_rule(
    base: Rule,
    base_n: usize,
    target_n: usize,
    caps: &Caps,
) -> Result<Rule, RuleError> {
    if target_n <= base_n {
        return Err(RuleError::Domain(format!(
            "extension target {target_n} must exceed the base size {base_n}"
        )));
    }
    let (_, padded) = finalist_levels(base_n, target_n)?;
    if padded > MAX_TEAMS {
        return Err(TournamentError::TooManyTeams(padded).into());
    }
    if !base.has_exact() && !base.has_sampler() {
        return Err(RuleError::NoEvaluator(base.id().to_string()));
    }
    let id = format!("ext:{}:{}", base.id(), base_n);
    let shape = Shape {
        base_n,
        target_n,
        padded,
    };
    let partitions = ext_partition_count(padded, base_n);
    let exact_ok = base.has_exact() && partitions <= BigUint::from(caps.partitions);

    let sampler_base = base.clone();
    let sampler = Arc::new(move |t: &Tournament, rng: &mut dyn RngCore| {
        shape.check(t)?;
        sample_once(t, &sampler_base, shape, rng)
    });
    let exact = exact_ok.then(|| {
        let exact_base = base.clone();
        Arc::new(move |t: &Tournament| {
            shape.check(t)?;
            exact_eval(t, &exact_base, shape)
        }) as Arc<super::ExactFn>
    });
    Ok(Rule::new(id, exact, Some(sampler))?.with_anonymous(base.is_anonymous()))
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    base_n: usize,
    target_n: usize,
    padded: usize,
}

impl Shape {
    fn check(&self, t: &Tournament) -> Result<(), RuleError> {
        if t.n() != self.target_n {
            return Err(RuleError::WrongTeamCount {
                rule: "ext".into(),
                expected: self.target_n,
                n: t.n(),
            });
        }
        Ok(())
    }

    fn group_size(&self) -> usize {
        self.padded / self.base_n
    }
}

fn sample_once(
    t: &Tournament,
    base: &Rule,
    shape: Shape,
    rng: &mut dyn RngCore,
) -> Result<usize, RuleError> {
    let padded = t.pad_with_dummies(shape.padded)?;
    let mut order: Vec<usize> = (0..shape.padded).collect();
    order.shuffle(rng);
    let finalists: Vec<usize> = order
        .chunks(shape.group_size())
        .map(|group| {
            let members: TeamSet = group.iter().copied().collect();
            pick(padded.top_cycle_within(members), rng)
        })
        .collect();
    let winner = base.sample(&padded.induced(&finalists), rng)?;
    Ok(match finalists.get(winner) {
        Some(&team) => team,
        // The base rule's own padding won.
        None => shape.padded + winner,
    })
}

fn exact_eval(t: &Tournament, base: &Rule, shape: Shape) -> Result<WinDistribution, RuleError> {
    let padded = t.pad_with_dummies(shape.padded)?;
    let mut partitions = Vec::new();
    partition_into_blocks(
        TeamSet::all(shape.padded).mask(),
        shape.group_size(),
        &mut Vec::new(),
        &mut partitions,
    );
    let orderings: Vec<Vec<usize>> = if base.is_anonymous() {
        vec![(0..shape.base_n).collect()]
    } else {
        (0..shape.base_n).permutations(shape.base_n).collect()
    };

    let mut memo: HashMap<Vec<usize>, WinDistribution> = HashMap::new();
    let mut acc = vec![Rational::zero(); shape.padded];
    let mut dummy = Rational::zero();
    for blocks in &partitions {
        let cycles: Vec<Vec<usize>> = blocks
            .iter()
            .map(|&b| padded.top_cycle_within(TeamSet::from_mask(b)).to_vec())
            .collect();
        let tuples: i64 = cycles.iter().map(|c| c.len() as i64).product();
        let weight = Rational::new(1, tuples * orderings.len() as i64);
        for tuple in cycles.iter().multi_cartesian_product() {
            for ordering in &orderings {
                let mut finalists: Vec<usize> = ordering.iter().map(|&k| *tuple[k]).collect();
                if base.is_anonymous() {
                    finalists.sort_unstable();
                }
                let dist = match memo.get(&finalists) {
                    Some(d) => d,
                    None => {
                        let d = base.exact(&padded.induced(&finalists))?;
                        memo.entry(finalists.clone()).or_insert(d)
                    }
                };
                for (pos, &team) in finalists.iter().enumerate() {
                    let p = dist.prob(pos);
                    if !p.is_zero() {
                        acc[team] += &weight * p;
                    }
                }
                if !dist.dummy_mass().is_zero() {
                    dummy += &weight * dist.dummy_mass();
                }
            }
        }
    }
    let count = Rational::from_integer(partitions.len() as i64);
    let n = shape.target_n;
    for p in &acc[n..] {
        dummy += p;
    }
    let probs = acc[..n].iter().map(|p| p / &count).collect();
    Ok(WinDistribution::new(probs, dummy / count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{match_winner, significant_only, topcycle_rule, uniform_rule};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A→B→C→A, all beating D.
    fn cyclic_top() -> Tournament {
        Tournament::from_fn(4, |i, j| j == 3 || (i, j) != (0, 2)).unwrap()
    }

    #[test]
    fn levels() {
        assert_eq!(finalist_levels(2, 4).unwrap(), (2, 4));
        assert_eq!(finalist_levels(2, 5).unwrap(), (3, 8));
        assert_eq!(finalist_levels(6, 36).unwrap(), (2, 36));
        assert_eq!(finalist_levels(3, 7).unwrap(), (2, 9));
        assert_eq!(ext_partition_count(4, 2), BigUint::from(3u32));
        assert_eq!(ext_partition_count(9, 3), BigUint::from(280u32));
    }

    #[test]
    fn match_winner_to_four() {
        let rule = extend_rule(match_winner(), 2, 4, &Caps::default()).unwrap();
        assert_eq!(rule.id(), "ext:match-winner:2");
        let d = rule.exact(&cyclic_top()).unwrap();
        let third = Rational::new(1, 3);
        assert_eq!(
            d.probs(),
            &[third.clone(), third.clone(), third, Rational::zero()]
        );
        assert!(d.dummy_mass().is_zero());
    }

    #[test]
    fn non_anonymous_base_is_averaged_over_orderings() {
        // Base: the first finalist always wins.
        let first = Rule::from_exact("first", |t: &Tournament| {
            Ok(WinDistribution::point(t.n(), 0))
        });
        let rule = extend_rule(first, 2, 4, &Caps::default()).unwrap();
        let d = rule.exact(&cyclic_top()).unwrap();
        // Each partition yields two finalists, each first with probability 1/2.
        // {AB|CD}: A,C  {AC|BD}: C,B  {AD|BC}: A,B
        assert_eq!(d.prob(0), &Rational::new(1, 3));
        assert_eq!(d.prob(1), &Rational::new(1, 3));
        assert_eq!(d.prob(2), &Rational::new(1, 3));
        assert!(d.is_normalized());
    }

    #[test]
    fn condorcet_winner_survives() {
        let t = Tournament::transitive(9)
            .unwrap()
            .permuted(&[4, 0, 1, 2, 3, 5, 6, 7, 8]);
        let rule = extend_rule(topcycle_rule(), 3, 9, &Caps::default()).unwrap();
        assert_eq!(rule.exact(&t).unwrap(), WinDistribution::point(9, 4));
        let padded_rule = extend_rule(topcycle_rule(), 3, 7, &Caps::default()).unwrap();
        let t7 = Tournament::transitive(7).unwrap();
        assert_eq!(
            padded_rule.exact(&t7).unwrap(),
            WinDistribution::point(7, 0)
        );
    }

    #[test]
    fn exact_stays_in_top_cycle_and_normalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rule = extend_rule(topcycle_rule(), 3, 8, &Caps::default()).unwrap();
        for _ in 0..20 {
            let t = Tournament::random(8, &mut rng).unwrap();
            let d = rule.exact(&t).unwrap();
            assert!(d.is_normalized());
            assert!(d.dummy_mass().is_zero());
            assert!(d.support().is_subset(t.top_cycle()));
        }
    }

    #[test]
    fn uniform_base_can_crown_dummies() {
        // With a top-cycle-inconsistent base an all-dummy group's finalist can win.
        // 4 real teams padded to 9: groups of three dummies exist.
        let rule = extend_rule(uniform_rule(), 3, 4, &Caps::default()).unwrap();
        let d = rule.exact(&Tournament::transitive(4).unwrap()).unwrap();
        assert!(d.is_normalized());
        assert!(d.dummy_mass() > &Rational::zero());
        let tc = extend_rule(topcycle_rule(), 3, 4, &Caps::default()).unwrap();
        assert!(tc
            .exact(&Tournament::transitive(4).unwrap())
            .unwrap()
            .dummy_mass()
            .is_zero());
    }

    #[test]
    fn exact_absent_past_partition_cap() {
        let rule = extend_rule(significant_only(), 6, 36, &Caps::default()).unwrap();
        assert!(!rule.has_exact());
        assert!(rule.has_sampler());
    }

    #[test]
    fn sampled_winners_in_top_cycle() {
        let rule = extend_rule(significant_only(), 6, 36, &Caps::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let t = Tournament::random(36, &mut rng).unwrap();
            let cycle = t.top_cycle();
            for _ in 0..200 {
                assert!(cycle.contains(rule.sample(&t, &mut rng).unwrap()));
            }
        }
    }

    #[test]
    fn sampler_matches_exact() {
        let rule = extend_rule(match_winner(), 2, 4, &Caps::default()).unwrap();
        let t = cyclic_top();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 30_000;
        let mut counts = [0u32; 4];
        for _ in 0..draws {
            counts[rule.sample(&t, &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[3], 0);
        let p = 1.0 / 3.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in &counts[..3] {
            assert!((*c as f64 - draws as f64 * p).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn bad_shapes() {
        assert!(extend_rule(topcycle_rule(), 4, 4, &Caps::default()).is_err());
        assert!(extend_rule(topcycle_rule(), 4, 65, &Caps::default()).is_err());
        let rule = extend_rule(topcycle_rule(), 2, 4, &Caps::default()).unwrap();
        assert!(rule.exact(&Tournament::transitive(5).unwrap()).is_err());
    }
}
