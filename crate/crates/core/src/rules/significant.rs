use super::{Rule, RuleError, WinDistribution, SIGNIFICANT_ONLY_MIN_TEAMS};
use crate::rational::Rational;
use crate::structure::{classify, mw_groups, TournamentClass, CLASSIFICATION_K};
use crate::tournament::{TeamSet, Tournament};

/// The significant-only rule (n ≥ 6).
///
/// * Condorcet winner: it gets 1.
/// * Far-Condorcet: uniform over all teams.
/// * Two or three MW pairs: members of MW pairs get 1/3 each.
/// * One MW pair: its members get 1/3, members of MW triples outside the
///   pair get 1/9, the remainder is split evenly over everyone else.
/// * No MW pair: members of MW triples get 1/6, the remainder is split
///   evenly over everyone else.
pub fn significant_only() -> Rule {
    Rule::from_exact("significant-only", |t: &Tournament| {
        significant_only_dist(t)
    })
    .with_anonymous(true)
}

fn significant_only_dist(t: &Tournament) -> Result<WinDistribution, RuleError> {
    let n = t.n();
    if n < SIGNIFICANT_ONLY_MIN_TEAMS {
        return Err(RuleError::UndefinedBelow {
            min: SIGNIFICANT_ONLY_MIN_TEAMS,
            n,
        });
    }
    let mw_pairs = match classify(t) {
        TournamentClass::Condorcet { winner } => return Ok(WinDistribution::point(n, winner)),
        TournamentClass::FarCondorcet => return Ok(WinDistribution::uniform_over(n, t.teams())),
        TournamentClass::NearCondorcet { mw_pairs } => mw_pairs,
    };
    let groups = mw_groups(t, CLASSIFICATION_K);
    let pair_members = groups
        .iter()
        .filter(|g| g.is_pair())
        .fold(TeamSet::EMPTY, |acc, g| acc.union(g.members));
    let triple_members = groups
        .iter()
        .filter(|g| g.is_triple())
        .fold(TeamSet::EMPTY, |acc, g| acc.union(g.members));

    let mut probs = vec![Rational::zero(); n];
    let (assigned, assigned_mass) = match mw_pairs {
        2 | 3 => {
            for i in pair_members {
                probs[i] = Rational::new(1, 3);
            }
            // Remaining teams get zero.
            return Ok(WinDistribution::from_probs(probs));
        }
        1 => {
            let triple_only = triple_members.difference(pair_members);
            for i in pair_members {
                probs[i] = Rational::new(1, 3);
            }
            for i in triple_only {
                probs[i] = Rational::new(1, 9);
            }
            let mass = Rational::new(2, 3) + Rational::new(triple_only.len() as i64, 9);
            (pair_members.union(triple_only), mass)
        }
        0 => {
            for i in triple_members {
                probs[i] = Rational::new(1, 6);
            }
            (
                triple_members,
                Rational::new(triple_members.len() as i64, 6),
            )
        }
        p => unreachable!("{p} MW pairs contradicts the size bound"),
    };
    let rest = t.teams().difference(assigned);
    if !rest.is_empty() {
        let share = (Rational::one() - assigned_mass) / Rational::from_integer(rest.len() as i64);
        for i in rest {
            probs[i] = share.clone();
        }
    }
    Ok(WinDistribution::from_probs(probs))
}
