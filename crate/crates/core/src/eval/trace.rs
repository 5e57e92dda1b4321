use std::fmt;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::binary::bin_parse;
use crate::reduce::render::{
    expand_items, items_normal, lex, parse_items, parse_paren_state, split_states, Item, ParenState, ARROW_SEP,
    PAREN_SEP,
};
use crate::reduce::{builtin, builtin_programs, Expr};
use crate::term::{names, Order, Token};
use crate::tree::tree_parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceErrorLabel {
    IllegalRule,
    TokenMutation,
    MissingTermination,
    PrematureTermination,
    RuleOrderSwap,
    MalformedState,
}

impl TraceErrorLabel {
    pub fn label(self) -> &'static str {
        match self {
            TraceErrorLabel::IllegalRule => "illegal-rule",
            TraceErrorLabel::TokenMutation => "token-mutation",
            TraceErrorLabel::MissingTermination => "missing-termination",
            TraceErrorLabel::PrematureTermination => "premature-termination",
            TraceErrorLabel::RuleOrderSwap => "rule-order-swap",
            TraceErrorLabel::MalformedState => "malformed-state",
        }
    }
}

impl fmt::Display for TraceErrorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJudgment {
    pub verdict: Verdict,
    /// Index of the first offending state; state 0 is the input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<TraceErrorLabel>,
}

impl TraceJudgment {
    pub fn valid() -> Self {
        TraceJudgment {
            verdict: Verdict::Valid,
            step: None,
            label: None,
        }
    }

    pub fn invalid(step: usize, label: TraceErrorLabel) -> Self {
        TraceJudgment {
            verdict: Verdict::Invalid,
            step: Some(step),
            label: Some(label),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

impl fmt::Display for TraceJudgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.step, self.label) {
            (Some(s), Some(l)) => write!(f, "invalid at step {s}: {l}"),
            _ => f.write_str("valid"),
        }
    }
}

/// Check a rendered reduction trace, one legal step at a time.
///
/// `task` names the traced function (`successor`, `inorder`, `preorder`,
/// optionally with a `_trace` suffix). When `input` is given, state 0 must
/// be the call on exactly that input.
pub fn validate_trace(text: &str, task: &str, input: Option<&[Token]>) -> Result<TraceJudgment, EvalError> {
    let func = task.strip_suffix("_trace").unwrap_or(task);
    match func {
        "successor" | builtin::SUCC => Ok(validate_paren(text, input)),
        builtin::INORDER | builtin::PREORDER => Ok(validate_arrow(text, func, input)),
        other => Err(EvalError::UnknownTask(other.to_owned())),
    }
}

use TraceErrorLabel::*;

fn oracle_paren_states(pending: &[Token]) -> Option<Vec<ParenState>> {
    let t = bin_parse(pending, Order::ConstructorReverse).ok()?;
    let trace = builtin_programs().normalize(&Expr::apply(builtin::SUCC, &[t])).ok()?;
    trace
        .states()
        .into_iter()
        .map(|e| {
            let toks = crate::reduce::render::paren_state(e).ok()?;
            parse_paren_state(&toks).ok()
        })
        .collect()
}

/// States produced by firing a clause other than the matching one on the
/// head of `prev`'s pending argument.
fn wrong_clause_states(prev: &ParenState) -> Vec<ParenState> {
    let Some(p) = &prev.pending else { return Vec::new() };
    let Some((head, rest)) = p.split_first() else {
        return Vec::new();
    };
    let with = |extra: &[&str], pending: Option<Vec<Token>>| {
        let mut prefix = prev.prefix.clone();
        prefix.extend(extra.iter().map(|&t| Token::from(t)));
        ParenState { prefix, pending }
    };
    let mut out = Vec::new();
    if head != names::X1 && !rest.is_empty() {
        out.push(with(&[names::X0], Some(rest.to_vec())));
    }
    if head != names::X0 {
        let mut done = with(&[names::X1], None);
        done.prefix.extend(rest.iter().cloned());
        out.push(done);
    }
    if head != names::B01 {
        out.push(with(&[names::X0, names::B01], None));
    }
    out
}

fn classify_paren(actual: &ParenState, expected: &ParenState, prev: &ParenState) -> TraceErrorLabel {
    if actual.content() == expected.content() {
        return match (actual.pending.is_some(), expected.pending.is_some()) {
            (true, false) => MissingTermination,
            (false, true) => PrematureTermination,
            _ => MalformedState,
        };
    }
    if wrong_clause_states(prev).contains(actual) {
        return IllegalRule;
    }
    TokenMutation
}

fn validate_paren(text: &str, input: Option<&[Token]>) -> TraceJudgment {
    let raw = split_states(&lex(text), PAREN_SEP);
    let mut states = Vec::with_capacity(raw.len());
    for (i, s) in raw.iter().enumerate() {
        match parse_paren_state(s) {
            Ok(st) => states.push(st),
            Err(_) => {
                // Report a bad parse only if nothing earlier already failed.
                states.truncate(i);
                return judge_paren_prefix(&states, input).unwrap_or(TraceJudgment::invalid(i, MalformedState));
            }
        }
    }
    judge_paren_prefix(&states, input).unwrap_or_else(|| {
        let last = states.len() - 1;
        if states[last].pending.is_some() {
            TraceJudgment::invalid(last, MissingTermination)
        } else {
            TraceJudgment::valid()
        }
    })
}

/// The first violation among already parsed states, if any.
fn judge_paren_prefix(states: &[ParenState], input: Option<&[Token]>) -> Option<TraceJudgment> {
    let first = states.first()?;
    let start_ok = first.prefix.is_empty() && first.pending.is_some();
    if let Some(input) = input {
        if !start_ok || first.pending.as_deref() != Some(input) {
            let label = if first.content() == input {
                MalformedState
            } else {
                TokenMutation
            };
            return Some(TraceJudgment::invalid(0, label));
        }
    } else if !start_ok {
        return Some(TraceJudgment::invalid(0, MalformedState));
    }
    let Some(expected) = oracle_paren_states(first.pending.as_ref().expect("checked")) else {
        return Some(TraceJudgment::invalid(0, TokenMutation));
    };
    for i in 1..states.len() {
        let Some(want) = expected.get(i) else {
            return Some(TraceJudgment::invalid(i, MissingTermination));
        };
        if states[i] != *want {
            return Some(TraceJudgment::invalid(
                i,
                classify_paren(&states[i], want, &states[i - 1]),
            ));
        }
    }
    None
}

fn swapped(func: &str) -> &'static str {
    if func == builtin::PREORDER {
        builtin::INORDER
    } else {
        builtin::PREORDER
    }
}

const SWAP: u8 = 1;
const STAY: u8 = 2;

/// How `actual` can arise from `prev` when each pending item is expanded
/// correctly, expanded with its parts in the other traversal's order, or left
/// alone. Returns the set of flag combinations that reach the full match, as
/// a bit mask over `SWAP | STAY` values.
fn explain(func: &str, prev: &[Item], actual: &[Item]) -> u16 {
    let m = actual.len();
    // reach[j] is a mask over flag combinations (bit f set = reachable with flags f).
    let mut reach = vec![0u16; m + 1];
    reach[0] = 1;
    for item in prev {
        let mut next = vec![0u16; m + 1];
        let options: Vec<(Vec<Item>, u8)> = match item {
            Item::Value(_) => vec![(vec![item.clone()], 0)],
            Item::Pending(_) => vec![
                (expand_items(func, std::slice::from_ref(item)), 0),
                (expand_items(swapped(func), std::slice::from_ref(item)), SWAP),
                (vec![item.clone()], STAY),
            ],
        };
        for j in 0..=m {
            if reach[j] == 0 {
                continue;
            }
            for (seq, flag) in &options {
                let end = j + seq.len();
                if end <= m && actual[j..end] == seq[..] {
                    for f in 0..4u8 {
                        if reach[j] & (1 << f) != 0 {
                            next[end] |= 1 << (f | flag);
                        }
                    }
                }
            }
        }
        reach = next;
    }
    reach[m]
}

fn classify_arrow(func: &str, prev: &[Item], actual: &[Item]) -> TraceErrorLabel {
    let mask = explain(func, prev, actual);
    if mask & (1 << SWAP) != 0 {
        return RuleOrderSwap;
    }
    if mask != 0 {
        return IllegalRule;
    }
    let expected = expand_items(func, prev);
    match (items_normal(actual), items_normal(&expected)) {
        (true, false) => PrematureTermination,
        (false, true) => MissingTermination,
        _ => TokenMutation,
    }
}

fn validate_arrow(text: &str, func: &str, input: Option<&[Token]>) -> TraceJudgment {
    let raw = split_states(&lex(text), ARROW_SEP);
    let mut prev: Option<Vec<Item>> = None;
    for (i, s) in raw.iter().enumerate() {
        let Ok(items) = parse_items(s) else {
            return TraceJudgment::invalid(i, MalformedState);
        };
        match &prev {
            None => {
                let single = matches!(items.as_slice(), [Item::Pending(_)]);
                if let Some(input) = input {
                    let want = match tree_parse(input) {
                        Ok(t) => vec![Item::Pending(t)],
                        Err(_) => return TraceJudgment::invalid(0, TokenMutation),
                    };
                    if items != want {
                        return TraceJudgment::invalid(0, if single { TokenMutation } else { MalformedState });
                    }
                } else if !single {
                    return TraceJudgment::invalid(0, MalformedState);
                }
            }
            Some(p) => {
                if items_normal(p) {
                    return TraceJudgment::invalid(i, MissingTermination);
                }
                if items != expand_items(func, p) {
                    return TraceJudgment::invalid(i, classify_arrow(func, p, &items));
                }
            }
        }
        prev = Some(items);
    }
    match prev {
        Some(p) if !items_normal(&p) => TraceJudgment::invalid(raw.len() - 1, MissingTermination),
        _ => TraceJudgment::valid(),
    }
}
