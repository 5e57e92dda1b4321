//! The two position-based successor procedures as state machines.
//!
//! Natural order: copy everything before the last `X0`, write one `X1`, then
//! fill with `X0` up to a precomputed output length. Reverse order: write `X0`
//! until the first `X0` of the input, write `X1` there, then copy the rest.

use std::sync::Arc;

use crate::asm::{AsmError, AsmMachine, AsmState, GuardedRule, Loc, StateView, Value};
use crate::binary::bin_parse;
use crate::term::{names, Order, Token};

use super::Mode;

const IN: &str = "in";
const IN_LEN: Loc = Loc::new("in_len");
const OUT: &str = "out";
pub(crate) const DONE: Loc = Loc::new("done");

// Natural order.
const POS: Loc = Loc::new("pos");
const BOUNDARY: Loc = Loc::new("boundary");
const PIVOT: Loc = Loc::new("pivot");
const OUT_LEN: Loc = Loc::new("out_len");

// Reverse order.
const READ: Loc = Loc::new("read");
const WRITE: Loc = Loc::new("write");
const SWITCH_AT: Loc = Loc::new("switch_at");
const SWITCHED: Loc = Loc::new("switched");
const CONSUME: Loc = Loc::new("consume");

/// Locations the natural machine's guards may read.
pub const NATURAL_GUARD_READS: &[&str] = &["pos", "boundary", "out_len"];
/// Locations the reverse machine's guards may read.
pub const REVERSE_GUARD_READS: &[&str] = &["switched", "read", "switch_at", "in_len"];

fn validate(input: &[Token], order: Order) -> Result<(), AsmError> {
    bin_parse(input, order)
        .map(|_| ())
        .map_err(|e| AsmError::Malformed(e.to_string()))
}

fn write_out(v: &StateView, at: Loc, tok: Value) -> Vec<(Loc, Value)> {
    let p = v.nat(at);
    vec![(Loc::at(OUT, p), tok), (at, (p + 1).into())]
}

fn natural_init(mode: Mode) -> impl Fn(&[Token]) -> Result<AsmState, AsmError> {
    move |input| {
        validate(input, Order::Natural)?;
        let len = input.len();
        let last_x0 = input.iter().rposition(|t| t == names::X0);
        let (boundary, pivot, out_len) = match last_x0 {
            Some(b) => (b, names::X1, len),
            // A lone 01 has no carry chain to mishandle.
            None if len == 1 => (0, names::B01, 2),
            None => match mode {
                Mode::Faithful => (0, names::B01, len),
                Mode::Corrected => (0, names::B01, len + 1),
            },
        };
        let mut s = AsmState::new()
            .with(POS, 0usize)
            .with(BOUNDARY, boundary)
            .with(PIVOT, Value::tok(pivot))
            .with(OUT_LEN, out_len)
            .with(DONE, false);
        s.load(IN, IN_LEN, input);
        Ok(s)
    }
}

pub fn natural_machine(mode: Mode) -> AsmMachine {
    let copy = GuardedRule::new(
        "copy",
        |v| v.nat(POS) < v.nat(BOUNDARY),
        |v| write_out(v, POS, v.get(Loc::at(IN, v.nat(POS))).clone()),
    );
    let pivot = GuardedRule::new(
        "pivot",
        |v| v.nat(POS) == v.nat(BOUNDARY),
        |v| write_out(v, POS, v.get(PIVOT).clone()),
    );
    let fill = GuardedRule::new(
        "fill",
        |v| {
            let p = v.nat(POS);
            p > v.nat(BOUNDARY) && p < v.nat(OUT_LEN)
        },
        |v| write_out(v, POS, Value::tok(names::X0)),
    );
    let halt = GuardedRule::new(
        "halt",
        |v| v.nat(POS) > v.nat(BOUNDARY) && v.nat(POS) >= v.nat(OUT_LEN),
        |_| vec![(DONE, true.into())],
    );
    AsmMachine {
        name: format!("natural-shortcut-{}", mode.name()),
        rules: vec![copy, pivot, fill, halt],
        init: Arc::new(natural_init(mode)),
        halted: Arc::new(|s| s.get(DONE).truthy()),
        output: Arc::new(|s| s.read_tokens(OUT, POS)),
    }
}

fn reverse_init(mode: Mode) -> impl Fn(&[Token]) -> Result<AsmState, AsmError> {
    move |input| {
        validate(input, Order::ConstructorReverse)?;
        let len = input.len();
        let (at, pivot, consume) = match input.iter().position(|t| t == names::X0) {
            Some(p) => (p, names::X1, true),
            None if len == 1 => (0, names::X0, false),
            None => match mode {
                Mode::Faithful => (len - 1, names::B01, true),
                Mode::Corrected => (len - 1, names::X0, false),
            },
        };
        let mut s = AsmState::new()
            .with(READ, 0usize)
            .with(WRITE, 0usize)
            .with(SWITCH_AT, at)
            .with(SWITCHED, false)
            .with(PIVOT, Value::tok(pivot))
            .with(CONSUME, consume)
            .with(DONE, false);
        s.load(IN, IN_LEN, input);
        Ok(s)
    }
}

pub fn reverse_machine(mode: Mode) -> AsmMachine {
    let carry = GuardedRule::new(
        "carry",
        |v| !v.flag(SWITCHED) && v.nat(READ) < v.nat(SWITCH_AT),
        |v| {
            let mut ups = write_out(v, WRITE, Value::tok(names::X0));
            ups.push((READ, (v.nat(READ) + 1).into()));
            ups
        },
    );
    let switch = GuardedRule::new(
        "switch",
        |v| !v.flag(SWITCHED) && v.nat(READ) == v.nat(SWITCH_AT),
        |v| {
            let mut ups = write_out(v, WRITE, v.get(PIVOT).clone());
            ups.push((SWITCHED, true.into()));
            if v.flag(CONSUME) {
                ups.push((READ, (v.nat(READ) + 1).into()));
            }
            ups
        },
    );
    let copy = GuardedRule::new(
        "copy",
        |v| v.flag(SWITCHED) && v.nat(READ) < v.nat(IN_LEN),
        |v| {
            let r = v.nat(READ);
            let mut ups = write_out(v, WRITE, v.get(Loc::at(IN, r)).clone());
            ups.push((READ, (r + 1).into()));
            ups
        },
    );
    let halt = GuardedRule::new(
        "halt",
        |v| v.flag(SWITCHED) && v.nat(READ) >= v.nat(IN_LEN),
        |_| vec![(DONE, true.into())],
    );
    AsmMachine {
        name: format!("reverse-shortcut-{}", mode.name()),
        rules: vec![carry, switch, copy, halt],
        init: Arc::new(reverse_init(mode)),
        halted: Arc::new(|s| s.get(DONE).truthy()),
        output: Arc::new(|s| s.read_tokens(OUT, WRITE)),
    }
}
