//! The built-in dispatching-rule catalog.
//!
//! Every entry scores candidates for argmax dispatch, so rules that prefer
//! small quantities negate them. Names follow the scheduling literature;
//! where a name alone is ambiguous the reading is pinned here, one line per
//! rule, so an alternate interpretation is a one-line edit.

use alloc::string::String;
use alloc::vec::Vec;

use super::{parse_rule, RuleProgram};

/// Catalog of `(name, score expression)`.
///
/// SPT shortest processing time; LPT longest processing time; STPT shortest
/// total processing time; MPSR most process sequence remaining; TWKR_MOST
/// most work remaining; SRM shortest remaining machining time (excluding the
/// candidate); SSO shortest subsequent operation; LSO longest subsequent
/// operation; the rest are the usual ratio and sum composites.
pub const BUILTIN_RULES: [(&str, &str); 14] = [
    ("SPT", "-PT"),
    ("LPT", "PT"),
    ("STPT", "-TWK"),
    ("MPSR", "NOPS_REMAINING"),
    ("TWKR_MOST", "TWKR"),
    ("SRM", "-SRM"),
    ("SSO", "-SSO"),
    ("LSO", "LSO"),
    ("SPT_TWK", "-(PT * TWK)"),
    ("SPT_TWKR", "-(PT / TWKR)"),
    ("LPT_TWK", "PT / TWK"),
    ("SPT_PLUS_SSO", "-(PT + SSO)"),
    ("SPT_LSO", "-(PT / LSO)"),
    ("RANDOM", "RAND"),
];

pub const BUILTIN_NAMES: [&str; 14] = [
    "SPT",
    "LPT",
    "STPT",
    "MPSR",
    "TWKR_MOST",
    "SRM",
    "SSO",
    "LSO",
    "SPT_TWK",
    "SPT_TWKR",
    "LPT_TWK",
    "SPT_PLUS_SSO",
    "SPT_LSO",
    "RANDOM",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule `{name}`; known rules: {known}")]
pub struct UnknownRuleError {
    pub name: String,
    pub known: String,
}

/// Looks up a catalog rule by name (case-insensitive).
pub fn builtin(name: &str) -> Result<RuleProgram, UnknownRuleError> {
    BUILTIN_RULES
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, source)| parse_rule(source).expect("catalog sources parse"))
        .ok_or_else(|| UnknownRuleError {
            name: name.into(),
            known: BUILTIN_NAMES.join(", "),
        })
}

/// The whole catalog, in declaration order.
pub fn all_builtins() -> Vec<(&'static str, RuleProgram)> {
    BUILTIN_RULES
        .iter()
        .map(|(name, source)| (*name, parse_rule(source).expect("catalog sources parse")))
        .collect()
}
