use std::sync::Arc;

use rand::seq::IteratorRandom;
use rand::RngCore;

use super::{Rule, RuleError, WinDistribution};
use crate::tournament::{TeamSet, Tournament};

/// Winner drawn uniformly from all teams, ignoring match results.
pub fn uniform_rule() -> Rule {
    Rule {
        id: "uniform".into(),
        exact: Some(Arc::new(|t: &Tournament| {
            Ok(WinDistribution::uniform_over(t.n(), t.teams()))
        })),
        sampler: Some(Arc::new(|t: &Tournament, rng: &mut dyn RngCore| {
            Ok((0..t.n()).choose(rng).expect("nonempty"))
        })),
        anonymous: true,
    }
}

/// Winner drawn uniformly from the top cycle.
pub fn topcycle_rule() -> Rule {
    Rule {
        id: "top-cycle".into(),
        exact: Some(Arc::new(|t: &Tournament| {
            Ok(WinDistribution::uniform_over(t.n(), t.top_cycle()))
        })),
        sampler: Some(Arc::new(|t: &Tournament, rng: &mut dyn RngCore| {
            Ok(pick(t.top_cycle(), rng))
        })),
        anonymous: true,
    }
}

/// The winner of the single match between two teams.
pub fn match_winner() -> Rule {
    fn winner(t: &Tournament) -> Result<usize, RuleError> {
        if t.n() != 2 {
            return Err(RuleError::WrongTeamCount {
                rule: "match-winner".into(),
                expected: 2,
                n: t.n(),
            });
        }
        Ok(if t.beats(0, 1) { 0 } else { 1 })
    }
    Rule {
        id: "match-winner".into(),
        exact: Some(Arc::new(|t: &Tournament| {
            Ok(WinDistribution::point(2, winner(t)?))
        })),
        sampler: Some(Arc::new(|t: &Tournament, _: &mut dyn RngCore| winner(t))),
        anonymous: true,
    }
}

pub(crate) fn pick(set: TeamSet, rng: &mut dyn RngCore) -> usize {
    set.iter().choose(rng).expect("nonempty set")
}
