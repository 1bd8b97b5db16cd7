//! Minimal winning groups and the Condorcet / near-Condorcet / far-Condorcet
//! classification.
//!
//! A team `i` with between one and `k-1` losses, together with the teams
//! beating it, is a minimal winning (MW) group led by `i`: if those teams
//! throw their matches against `i`, it becomes a Condorcet winner. Members of
//! any MW group are called significant.

use serde::Serialize;

use crate::format::to_compact;
use crate::tournament::{TeamSet, Tournament};

/// Coalition size used by [`classify`] and the significant-only rule.
pub const CLASSIFICATION_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MwGroup {
    pub leader: usize,
    pub members: TeamSet,
}

impl MwGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_pair(&self) -> bool {
        self.len() == 2
    }

    pub fn is_triple(&self) -> bool {
        self.len() == 3
    }
}

/// One group per team with `1 ≤ losses ≤ k-1`, sorted by leader. Meaningful
/// only for tournaments without a Condorcet winner.
pub fn mw_groups(t: &Tournament, k: usize) -> Vec<MwGroup> {
    (0..t.n())
        .filter(|&i| (1..k).contains(&t.in_degree(i)))
        .map(|i| MwGroup {
            leader: i,
            members: t.losses(i).union(TeamSet::singleton(i)),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TournamentClass {
    Condorcet { winner: usize },
    FarCondorcet,
    NearCondorcet { mw_pairs: usize },
}

impl TournamentClass {
    pub fn label(&self) -> String {
        match self {
            TournamentClass::Condorcet { winner } => format!("condorcet({winner})"),
            TournamentClass::FarCondorcet => "far-condorcet".into(),
            TournamentClass::NearCondorcet { mw_pairs } => {
                format!("near-condorcet({mw_pairs} pairs)")
            }
        }
    }
}

/// Partition at `k = 3`.
pub fn classify(t: &Tournament) -> TournamentClass {
    if let Some(winner) = t.condorcet_winner() {
        return TournamentClass::Condorcet { winner };
    }
    let groups = mw_groups(t, CLASSIFICATION_K);
    if groups.is_empty() {
        TournamentClass::FarCondorcet
    } else {
        TournamentClass::NearCondorcet {
            mw_pairs: groups.iter().filter(|g| g.is_pair()).count(),
        }
    }
}

/// Union of all group members.
pub fn significant_teams(groups: &[MwGroup]) -> TeamSet {
    groups
        .iter()
        .fold(TeamSet::EMPTY, |acc, g| acc.union(g.members))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralDiagnostics {
    pub tournament: String,
    pub class: TournamentClass,
    pub mw_groups: Vec<MwGroup>,
    pub significant_count: usize,
    pub violations: Vec<String>,
}

impl StructuralDiagnostics {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the k = 3 structure facts for a near-Condorcet tournament: unique
/// leaders, pairwise intersecting groups, at most six significant teams, at
/// most three MW pairs spanning at most three teams, and the 5/4/3 caps on
/// significant teams for one/two/three pairs. Other classes yield no
/// violations.
pub fn check_structural_lemmas(t: &Tournament) -> StructuralDiagnostics {
    let class = classify(t);
    let groups = if matches!(class, TournamentClass::NearCondorcet { .. }) {
        mw_groups(t, CLASSIFICATION_K)
    } else {
        Vec::new()
    };
    let significant = significant_teams(&groups);
    let mut violations = Vec::new();

    for g in &groups {
        let leaders: Vec<usize> = g
            .members
            .iter()
            .filter(|&m| t.losses(m).union(TeamSet::singleton(m)) == g.members)
            .collect();
        if leaders != [g.leader] {
            violations.push(format!(
                "unique-leader: group {:?} has leaders {leaders:?}",
                g.members
            ));
        }
    }
    for (a, g1) in groups.iter().enumerate() {
        for g2 in &groups[a + 1..] {
            if !(g2.members.contains(g1.leader) || g1.members.contains(g2.leader)) {
                violations.push(format!(
                    "intersection: groups led by {} and {} contain neither leader",
                    g1.leader, g2.leader
                ));
            }
            if g1.members.intersection(g2.members).is_empty() {
                violations.push(format!(
                    "intersection: groups led by {} and {} are disjoint",
                    g1.leader, g2.leader
                ));
            }
        }
    }
    let pairs: Vec<&MwGroup> = groups.iter().filter(|g| g.is_pair()).collect();
    let pair_union = pairs
        .iter()
        .fold(TeamSet::EMPTY, |acc, g| acc.union(g.members));
    if significant.len() > 6 {
        violations.push(format!("size: {} significant teams > 6", significant.len()));
    }
    if pairs.len() > 3 {
        violations.push(format!("size: {} MW pairs > 3", pairs.len()));
    }
    if pair_union.len() > 3 {
        violations.push(format!(
            "size: MW pairs span {} teams > 3",
            pair_union.len()
        ));
    }
    let cap = match pairs.len() {
        1 => Some(5),
        2 => Some(4),
        3 => Some(3),
        _ => None,
    };
    if let Some(cap) = cap {
        if significant.len() > cap {
            violations.push(format!(
                "size: {} MW pairs with {} significant teams > {cap}",
                pairs.len(),
                significant.len()
            ));
        }
    }

    StructuralDiagnostics {
        tournament: to_compact(t),
        class,
        mw_groups: groups,
        significant_count: significant.len(),
        violations,
    }
}
