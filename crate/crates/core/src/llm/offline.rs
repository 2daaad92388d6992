//! A hermetic provider that stands in for a language model.
//!
//! Generation requests are answered by structurally editing the rule
//! expressions carried in the request context: grafting a subtree from one
//! parent into the other, swapping an operator, substituting a feature,
//! jittering a constant, negating a subtree, or appending a term. The edits
//! read the structured [`RequestContext`](super::RequestContext), never the
//! prompt text. Reflection requests get short canned notes. Everything is
//! driven by a seeded generator, so runs are reproducible and need no
//! network.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::{Feature, ALL_FEATURES};
use crate::rule::{parse_rule, BinOp, Expr};

use super::{CompletionRequest, Provider, ProviderError, RequestContext, RequestKind};

/// Replacement expressions used when a request carries no usable source.
const STOCK_RULES: &[&str] = &[
    "-PT",
    "-(PT / TWKR)",
    "-(PT * TWK)",
    "-(PT + SSO)",
    "TWKR",
    "-SRM",
    "-(PT / (1 + WAIT))",
    "NOPS_REMAINING",
    "-(PT + WAIT)",
    "-max(PT, SSO)",
    "-PT - SSO / 2",
    "-sqrt(PT * TWK)",
    "-PT + RAND / 10",
    "-PT / TWK",
];

/// An edited tree larger than this is discarded for a stock rule, keeping
/// generated rules readable and evaluation cheap.
const MAX_NODES: usize = 48;

const CO_REFLECT_NOTES: &[&str] = &[
    "The better rule keeps the machine busy with quick wins: prefer shorter \
     processing first, and use remaining work only to break ties.",
    "Scaling processing time by the job's remaining work separates urgent \
     jobs; the worse rule leans on a single raw feature and stalls late jobs.",
    "Keep the negated processing-time core from the better rule; the extra \
     terms in the worse one add noise without direction.",
    "Ratios beat sums here: dividing processing time by remaining work gives \
     a unit-free urgency that generalizes across case sizes.",
];

const SELF_IMPROVED_NOTES: &[&str] = &[
    "The edit worked because it strengthened the short-operation preference \
     while keeping the remaining-work term as a secondary signal.",
    "Bounding the new term kept scores comparable across candidates, which \
     is what let the refinement help instead of thrash.",
    "Replacing a raw feature with a ratio made the rule scale-free, a change \
     worth repeating on other terms.",
];

const SELF_REGRESSED_NOTES: &[&str] = &[
    "The edit hurt because it diluted the processing-time signal; avoid \
     adding terms that can dwarf the core preference.",
    "Dropping the remaining-work tie-breaker made the rule myopic near the \
     end of jobs; keep a look-ahead term next time.",
    "The added randomness outweighed the heuristic part; noise should stay \
     small relative to the main terms.",
];

const COLLECTIVE_NOTES: &[&str] = &[
    "Across recent edits the winners prefer shorter processing first, keep a \
     remaining-work term for look-ahead, and avoid terms that can explode.",
    "Durable guidance: negate processing time as the core signal, scale it \
     by remaining work, and keep any random term tiny.",
    "Short rules with one ratio and one tie-breaker keep beating long sums; \
     prune aggressively before adding new ingredients.",
];

/// Draw a canned response or a structured rule edit for one request.
///
/// This is the pure core of [`OfflineMutator`]: all randomness comes from
/// the caller's generator, so the same seed and request sequence yields the
/// same responses.
pub fn offline_response(
    kind: RequestKind,
    context: &RequestContext,
    rng: &mut ChaCha8Rng,
) -> String {
    match kind {
        RequestKind::Init => wrap_rule(fresh_rule(context, rng), rng),
        RequestKind::Crossover => wrap_rule(crossed_rule(context, rng), rng),
        RequestKind::Mutate => wrap_rule(mutated_rule(context, rng), rng),
        RequestKind::CoReflect => pick(CO_REFLECT_NOTES, rng),
        RequestKind::SelfReflect => {
            if context.improved.unwrap_or(false) {
                pick(SELF_IMPROVED_NOTES, rng)
            } else {
                pick(SELF_REGRESSED_NOTES, rng)
            }
        }
        RequestKind::Collective => pick(COLLECTIVE_NOTES, rng),
    }
}

/// A [`Provider`] wrapping [`offline_response`] with its own seeded state.
#[derive(Debug, Clone)]
pub struct OfflineMutator {
    rng: ChaCha8Rng,
}

impl OfflineMutator {
    pub fn new(seed: u64) -> Self {
        OfflineMutator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Provider for OfflineMutator {
    fn name(&self) -> &str {
        "offline"
    }

    fn complete(&mut self, request: &CompletionRequest) -> Result<String, ProviderError> {
        Ok(offline_response(request.kind, &request.context, &mut self.rng))
    }
}

fn pick(pool: &[&str], rng: &mut ChaCha8Rng) -> String {
    pool.choose(rng).expect("pool is nonempty").to_string()
}

fn stock_ast(rng: &mut ChaCha8Rng) -> Expr {
    let source = STOCK_RULES.choose(rng).expect("stock pool is nonempty");
    parse_rule(source).expect("stock rules parse").ast
}

/// Parse the request's source rules, dropping any that do not parse.
fn context_asts(context: &RequestContext) -> Vec<Expr> {
    context
        .sources
        .iter()
        .filter_map(|source| parse_rule(source).ok().map(|program| program.ast))
        .collect()
}

fn random_feature(rng: &mut ChaCha8Rng) -> Feature {
    *ALL_FEATURES.choose(rng).expect("feature list is nonempty")
}

fn random_op(rng: &mut ChaCha8Rng) -> BinOp {
    *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]
        .choose(rng)
        .expect("operator list is nonempty")
}

fn indices_matching(ast: &Expr, pred: impl Fn(&Expr) -> bool) -> Vec<usize> {
    (0..ast.node_count())
        .filter(|&i| ast.node_at(i).map(|node| pred(&node)).unwrap_or(false))
        .collect()
}

fn swap_operator(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    let spots = indices_matching(&ast, |node| matches!(node, Expr::Bin(..)));
    let Some(&index) = spots.choose(rng) else {
        return substitute_feature(ast, rng);
    };
    let Some(Expr::Bin(old, lhs, rhs)) = ast.node_at(index) else {
        return ast;
    };
    let mut op = random_op(rng);
    if op == old {
        op = match op {
            BinOp::Add => BinOp::Mul,
            BinOp::Sub => BinOp::Div,
            BinOp::Mul => BinOp::Add,
            BinOp::Div => BinOp::Sub,
        };
    }
    ast.with_node_replaced(index, &Expr::Bin(op, lhs, rhs))
}

fn substitute_feature(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    let spots = indices_matching(&ast, |node| matches!(node, Expr::Feature(_)));
    let Some(&index) = spots.choose(rng) else {
        return Expr::Bin(
            BinOp::Sub,
            Box::new(ast),
            Box::new(Expr::Feature(random_feature(rng))),
        );
    };
    ast.with_node_replaced(index, &Expr::Feature(random_feature(rng)))
}

fn jitter_constant(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    let spots = indices_matching(&ast, |node| matches!(node, Expr::Num(_)));
    let Some(&index) = spots.choose(rng) else {
        return substitute_feature(ast, rng);
    };
    let Some(Expr::Num(value)) = ast.node_at(index) else {
        return ast;
    };
    let scale = *[0.5, 1.5, 2.0].choose(rng).expect("scale list is nonempty");
    ast.with_node_replaced(index, &Expr::Num(value * scale))
}

fn negate_subtree(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    let index = rng.random_range(0..ast.node_count());
    let Some(subtree) = ast.node_at(index) else {
        return ast;
    };
    ast.with_node_replaced(index, &Expr::Neg(Box::new(subtree)))
}

fn append_term(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    Expr::Bin(
        random_op(rng),
        Box::new(ast),
        Box::new(Expr::Feature(random_feature(rng))),
    )
}

fn random_edit(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    match rng.random_range(0..5u8) {
        0 => swap_operator(ast, rng),
        1 => substitute_feature(ast, rng),
        2 => jitter_constant(ast, rng),
        3 => negate_subtree(ast, rng),
        _ => append_term(ast, rng),
    }
}

/// Graft a random subtree of `donor` into a random spot of `base`.
fn graft(base: &Expr, donor: &Expr, rng: &mut ChaCha8Rng) -> Expr {
    let target = rng.random_range(0..base.node_count());
    let source = rng.random_range(0..donor.node_count());
    let subtree = donor.node_at(source).expect("index is in range");
    base.with_node_replaced(target, &subtree)
}

fn capped(ast: Expr, rng: &mut ChaCha8Rng) -> Expr {
    if ast.node_count() > MAX_NODES {
        stock_ast(rng)
    } else {
        ast
    }
}

fn fresh_rule(context: &RequestContext, rng: &mut ChaCha8Rng) -> String {
    let asts = context_asts(context);
    let base = asts
        .choose(rng)
        .cloned()
        .unwrap_or_else(|| stock_ast(rng));
    let mut rule = random_edit(base, rng);
    if rng.random_bool(0.5) {
        rule = random_edit(rule, rng);
    }
    capped(rule, rng).print()
}

fn crossed_rule(context: &RequestContext, rng: &mut ChaCha8Rng) -> String {
    let mut asts = context_asts(context);
    while asts.len() < 2 {
        asts.push(stock_ast(rng));
    }
    let mut rule = graft(&asts[0], &asts[1], rng);
    if rng.random_bool(0.5) {
        rule = random_edit(rule, rng);
    }
    capped(rule, rng).print()
}

fn mutated_rule(context: &RequestContext, rng: &mut ChaCha8Rng) -> String {
    let asts = context_asts(context);
    let base = asts
        .first()
        .cloned()
        .unwrap_or_else(|| stock_ast(rng));
    capped(random_edit(base, rng), rng).print()
}

const RULE_PROSE: &[&str] = &[
    "Short operations should clear the machine quickly.",
    "This balances immediate speed against the work still queued behind it.",
    "Remaining work acts as the tie-breaker here.",
    "The ratio keeps scores comparable across jobs of different sizes.",
];

/// Dress a rule expression the way a chatty model would: sometimes bare,
/// sometimes with prose, sometimes fenced. Every variant survives
/// [`extract_rule`](super::extract_rule) unchanged.
fn wrap_rule(rule: String, rng: &mut ChaCha8Rng) -> String {
    let prose = pick(RULE_PROSE, rng);
    match rng.random_range(0..4u8) {
        0 => rule,
        1 => format!("{prose}\n{rule}"),
        2 => format!("{prose}\n```\n{rule}\n```"),
        _ => format!(
            "Reasoning: {prose}\n```text\n# dispatch score\n{rule}\n```\nHigher means dispatch first."
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{extract_rule, Message};
    use alloc::vec;

    fn request(kind: RequestKind, sources: Vec<&str>, improved: Option<bool>) -> CompletionRequest {
        CompletionRequest {
            kind,
            messages: vec![Message::user("ignored")],
            temperature: 1.0,
            context: RequestContext {
                sources: sources.into_iter().map(String::from).collect(),
                improved,
            },
        }
    }

    #[test]
    fn stock_rules_all_parse() {
        for source in STOCK_RULES {
            parse_rule(source).unwrap();
        }
    }

    #[test]
    fn generation_responses_parse_after_extraction() {
        let mut provider = OfflineMutator::new(11);
        for i in 0..200 {
            let kind = match i % 3 {
                0 => RequestKind::Init,
                1 => RequestKind::Crossover,
                _ => RequestKind::Mutate,
            };
            let req = request(kind, vec!["-(PT / TWKR)", "PT + SSO"], None);
            let response = provider.complete(&req).unwrap();
            let rule = extract_rule(&response);
            parse_rule(&rule).unwrap_or_else(|err| {
                panic!("emission {i} failed to parse: {err}\nresponse:\n{response}")
            });
        }
    }

    #[test]
    fn same_seed_gives_same_responses() {
        let req = request(RequestKind::Init, vec!["-PT"], None);
        let mut a = OfflineMutator::new(42);
        let mut b = OfflineMutator::new(42);
        for _ in 0..20 {
            assert_eq!(a.complete(&req).unwrap(), b.complete(&req).unwrap());
        }
    }

    #[test]
    fn garbage_sources_fall_back_to_stock() {
        let mut provider = OfflineMutator::new(3);
        let req = request(RequestKind::Crossover, vec!["???", ""], None);
        let response = provider.complete(&req).unwrap();
        parse_rule(&extract_rule(&response)).unwrap();
    }

    #[test]
    fn reflection_branches_follow_the_outcome_flag() {
        let mut provider = OfflineMutator::new(5);
        let improved = provider
            .complete(&request(RequestKind::SelfReflect, vec![], Some(true)))
            .unwrap();
        assert!(SELF_IMPROVED_NOTES.contains(&improved.as_str()));
        let regressed = provider
            .complete(&request(RequestKind::SelfReflect, vec![], Some(false)))
            .unwrap();
        assert!(SELF_REGRESSED_NOTES.contains(&regressed.as_str()));
    }

    #[test]
    fn oversized_edits_are_replaced_by_stock() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let big = "PT + ".repeat(40) + "PT";
        let ast = parse_rule(&big).unwrap().ast;
        assert!(ast.node_count() > MAX_NODES);
        let kept = capped(ast, &mut rng);
        assert!(kept.node_count() <= MAX_NODES);
    }
}
