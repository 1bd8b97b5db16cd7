//! Tournament rules with exact winning probabilities, and an audit engine
//! for their strategic properties.
//!
//! Teams are `0..n`; a [`Tournament`] records who beat whom. A [`Rule`]
//! maps a tournament to a [`WinDistribution`] over exact [`Rational`]s.
//! The [`audit`] module checks Condorcet and top-cycle consistency,
//! monotonicity, and the largest gain any small coalition can obtain by
//! fixing its internal matches.

pub mod audit;
pub mod format;
pub mod rational;
pub mod rules;
pub mod structure;
pub mod tournament;

pub use audit::{
    audit_cc, audit_ksnm, audit_monotone, audit_top_cycle, audit_top_cycle_sampled, bound_check,
    replay, AuditError, AuditMode, AuditOptions, AuditReport, CollusionScenario,
};
pub use format::{parse_any, parse_compact, parse_text, to_compact, to_text, ParseError};
pub use rational::Rational;
pub use rules::{build_rule, Caps, Rule, RuleError, RuleId, WinDistribution};
pub use structure::{check_structural_lemmas, classify, mw_groups, MwGroup, TournamentClass};
pub use tournament::{TeamSet, Tournament, TournamentError};
