//! Non-recursive, position-based successor procedures of the kind a trained
//! sequence model settles on, with their characteristic failures on inputs
//! whose carry runs all the way to the leading `01`.

mod machines;

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::asm::{asm_run, AsmError, AsmMachine, AsmRun, Loc, DEFAULT_BUDGET};
use crate::binary::{bin_encode, bin_tokens, bit_length};
use crate::eval::{failure_signature, FailureSignature};
use crate::reduce::{builtin, builtin_programs, Expr};
use crate::term::{linearize, reorder, Order, Token};

pub use machines::{natural_machine, reverse_machine, NATURAL_GUARD_READS, REVERSE_GUARD_READS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reproduces the one-token-short failure on all-ones inputs.
    Faithful,
    /// Agrees with the oracle everywhere.
    Corrected,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Faithful => "faithful",
            Mode::Corrected => "corrected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ShortcutKind {
    #[serde(serialize_with = "order_name")]
    pub order: Order,
    pub mode: Mode,
}

fn order_name<S: serde::Serializer>(o: &Order, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(o.name())
}

impl ShortcutKind {
    pub fn new(order: Order, mode: Mode) -> Result<Self, ShortcutError> {
        match order {
            Order::TreeAppendix => Err(ShortcutError::Order(order)),
            _ => Ok(ShortcutKind { order, mode }),
        }
    }

    pub fn machine(self) -> AsmMachine {
        match self.order {
            Order::Natural => natural_machine(self.mode),
            _ => reverse_machine(self.mode),
        }
    }

    /// The only locations this kind's guards are allowed to read.
    pub fn guard_reads(self) -> &'static [&'static str] {
        match self.order {
            Order::Natural => NATURAL_GUARD_READS,
            _ => REVERSE_GUARD_READS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShortcutError {
    #[error("shortcut emulation is defined for binary orders, not {0:?}")]
    Order(Order),
    #[error(transparent)]
    Machine(#[from] AsmError),
    #[error("guard of rule {rule} read {loc}, outside its allowed locations")]
    GuardRead { rule: String, loc: Loc },
    #[error("empty bit-length range")]
    EmptyRange,
}

/// Run the machine for `kind` on `tokens` (given in `kind.order`).
pub fn emulate_logged(kind: ShortcutKind, tokens: &[Token]) -> Result<(Vec<Token>, AsmRun), ShortcutError> {
    let m = kind.machine();
    let run = asm_run(&m, tokens, DEFAULT_BUDGET)?;
    Ok(((m.output)(&run.state), run))
}

pub fn emulate(kind: ShortcutKind, tokens: &[Token]) -> Result<Vec<Token>, ShortcutError> {
    emulate_logged(kind, tokens).map(|(out, _)| out)
}

pub fn emulate_natural(tokens: &[Token], mode: Mode) -> Result<Vec<Token>, ShortcutError> {
    emulate(
        ShortcutKind {
            order: Order::Natural,
            mode,
        },
        tokens,
    )
}

pub fn emulate_reverse(tokens: &[Token], mode: Mode) -> Result<Vec<Token>, ShortcutError> {
    emulate(
        ShortcutKind {
            order: Order::ConstructorReverse,
            mode,
        },
        tokens,
    )
}

/// Check that no guard in `run` read a location outside `kind.guard_reads()`.
pub fn audit_guards(kind: ShortcutKind, run: &AsmRun) -> Result<(), ShortcutError> {
    let allowed = kind.guard_reads();
    for rec in &run.log {
        for (rule, reads) in &rec.guard_reads {
            if let Some(loc) = reads.iter().find(|l| l.index.is_some() || !allowed.contains(&l.name)) {
                return Err(ShortcutError::GuardRead {
                    rule: rule.clone(),
                    loc: *loc,
                });
            }
        }
    }
    Ok(())
}

/// 1 for all-ones values of at least two bits, 2 for `1 0 1…1` values of at
/// least three bits, 0 otherwise.
pub fn edge_group(n: u64) -> u8 {
    if n < 3 {
        return 0;
    }
    let bits = bit_length(n);
    if n == (1u64 << bits) - 1 {
        1
    } else if bits >= 3 && n == 3 * (1u64 << (bits - 2)) - 1 {
        2
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeMember {
    pub bits: u32,
    pub value: u64,
    /// Reverse (constructor) order.
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCaseGroup {
    pub id: u8,
    pub members: Vec<EdgeMember>,
}

/// One member per bit length for each group. Lengths below a group's minimum
/// (2 for group 1, 3 for group 2) are skipped.
pub fn edge_inputs(bit_lengths: RangeInclusive<u32>) -> Result<[EdgeCaseGroup; 2], ShortcutError> {
    if bit_lengths.is_empty() {
        return Err(ShortcutError::EmptyRange);
    }
    let member = |bits: u32, value: u64| EdgeMember {
        bits,
        value,
        tokens: bin_tokens(value, Order::ConstructorReverse).expect("positive"),
    };
    let g1 = bit_lengths
        .clone()
        .filter(|&l| (2..=63).contains(&l))
        .map(|l| member(l, (1u64 << l) - 1))
        .collect();
    let g2 = bit_lengths
        .filter(|&l| (3..=63).contains(&l))
        .map(|l| member(l, 3 * (1u64 << (l - 2)) - 1))
        .collect();
    Ok([
        EdgeCaseGroup { id: 1, members: g1 },
        EdgeCaseGroup { id: 2, members: g2 },
    ])
}

/// The successor of `n` by reduction, in `order`.
pub fn oracle_successor(n: u64, order: Order) -> Vec<Token> {
    let e = Expr::apply(builtin::SUCC, &[bin_encode(n).expect("positive")]);
    let r = builtin_programs().evaluate(&e).expect("successor terminates");
    let seq = linearize(&r.to_term().expect("normal form is a value"));
    reorder(&seq, order).expect("binary order").tokens
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub value: u64,
    pub bits: u32,
    pub edge_group: u8,
    pub input: Vec<Token>,
    pub expected: Vec<Token>,
    pub got: Vec<Token>,
    pub class: FailureSignature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub kind: ShortcutKind,
    pub from: u64,
    pub to: u64,
    pub checked: u64,
    pub disagreements: Vec<Disagreement>,
}

/// Compare the emulator against reduction on every value in `values`.
pub fn diff_against_oracle(kind: ShortcutKind, values: RangeInclusive<u64>) -> DiffReport {
    let (from, to) = (*values.start(), *values.end());
    let mut disagreements = Vec::new();
    let mut checked = 0;
    for n in values.filter(|&n| n >= 1) {
        checked += 1;
        let input = bin_tokens(n, kind.order).expect("positive");
        let expected = oracle_successor(n, kind.order);
        let got = emulate(kind, &input).expect("well-formed input");
        if got != expected {
            let class = failure_signature(&got, &expected).expect("differs");
            disagreements.push(Disagreement {
                value: n,
                bits: bit_length(n),
                edge_group: edge_group(n),
                input,
                expected,
                got,
                class,
            });
        }
    }
    DiffReport {
        kind,
        from,
        to,
        checked,
        disagreements,
    }
}

impl DiffReport {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for d in &self.disagreements {
            out.push_str(&serde_json::to_string(d).expect("plain data"));
            out.push('\n');
        }
        out
    }

    /// Disagreement counts per (bit length, edge group, class).
    pub fn summary_table(&self) -> String {
        use std::collections::BTreeMap;
        let mut rows: BTreeMap<(u32, u8, FailureSignature), usize> = BTreeMap::new();
        for d in &self.disagreements {
            *rows.entry((d.bits, d.edge_group, d.class)).or_default() += 1;
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} shortcut vs oracle, values {}..={}: {} checked, {} disagree",
            self.kind.order.name(),
            self.kind.mode.name(),
            self.from,
            self.to,
            self.checked,
            self.disagreements.len()
        );
        let _ = writeln!(out, "{:>4}  {:>5}  {:<16}  {:>5}", "bits", "group", "class", "count");
        for ((bits, group, class), n) in rows {
            let _ = writeln!(out, "{bits:>4}  {group:>5}  {:<16}  {n:>5}", class.label());
        }
        out
    }
}

#[cfg(test)]
mod tests;
