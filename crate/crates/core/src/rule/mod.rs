//! Priority-rule expression language: the encoding of an evolving individual.
//!
//! A rule is an arithmetic expression over [`Feature`](crate::features::Feature)
//! identifiers. At each dispatch decision the simulator evaluates the rule on
//! every ready candidate and starts the one with the highest score, so rules
//! that minimize a quantity negate it.

mod ast;
mod builtins;
mod eval;
mod parse;

pub use ast::{BinOp, Expr, Func};
pub use builtins::{all_builtins, builtin, UnknownRuleError, BUILTIN_NAMES};
pub use eval::{eval_rule, RuleEvalError};
pub use parse::{parse_rule, ParseRuleError};

use alloc::string::String;
use alloc::vec::Vec;

/// A parsed rule: original source text plus its expression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleProgram {
    pub source: String,
    pub ast: Expr,
}

impl RuleProgram {
    /// Renders the tree back to source. Parsing the result reproduces the
    /// same tree, whatever whitespace the original had.
    pub fn canonical(&self) -> String {
        self.ast.print()
    }
}

impl core::fmt::Display for RuleProgram {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.source)
    }
}

/// Parses rule-file text: lines starting with `#` are comments, remaining
/// non-empty lines form one expression.
pub fn parse_rule_file_text(text: &str) -> Result<RuleProgram, ParseRuleError> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    parse_rule(&lines.join(" "))
}
