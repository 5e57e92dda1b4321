//! Successor on reverse-order binary numbers, as an in-place machine and as a
//! recursive machine that delegates `X1 b` to a child agent.

use std::sync::Arc;

use super::machine::{AsmError, AsmMachine, GuardedRule};
use super::rasm::{CallRule, RasmSpec, RET, RET_LEN};
use super::store::{AsmState, Loc, StateView, Value};
use crate::binary::bin_parse;
use crate::term::{names, Order, Token};

pub const TAPE: &str = "tape";
pub const POS: Loc = Loc::new("pos");
pub const LEN: Loc = Loc::new("len");
pub const DONE: Loc = Loc::new("done");
pub const EMIT: Loc = Loc::new("emit");

fn init_tape(input: &[Token]) -> Result<AsmState, AsmError> {
    bin_parse(input, Order::ConstructorReverse).map_err(|e| AsmError::Malformed(e.to_string()))?;
    let mut s = AsmState::new().with(POS, 0usize).with(DONE, false);
    s.load(TAPE, LEN, input);
    Ok(s)
}

fn head_is(v: &StateView, tok: &str) -> bool {
    !v.flag(DONE) && v.is_token(Loc::at(TAPE, v.nat(POS)), tok)
}

/// Walks the carry from the least significant end:
/// `X1` becomes `X0` and moves on, `X0` becomes `X1` and stops,
/// `01` becomes `X0 01` and stops.
pub fn successor_asm() -> AsmMachine {
    let x1 = GuardedRule::new(
        "X1",
        |v| head_is(v, names::X1),
        |v| {
            let p = v.nat(POS);
            vec![(Loc::at(TAPE, p), Value::tok(names::X0)), (POS, (p + 1).into())]
        },
    );
    let x0 = GuardedRule::new(
        "X0",
        |v| head_is(v, names::X0),
        |v| {
            vec![
                (Loc::at(TAPE, v.nat(POS)), Value::tok(names::X1)),
                (EMIT, Value::tok(names::X1)),
                (DONE, true.into()),
            ]
        },
    );
    let base = GuardedRule::new(
        "01",
        |v| head_is(v, names::B01),
        |v| {
            let p = v.nat(POS);
            vec![
                (Loc::at(TAPE, p), Value::tok(names::X0)),
                (Loc::at(TAPE, p + 1), Value::tok(names::B01)),
                (LEN, (v.nat(LEN) + 1).into()),
                (EMIT, Value::tok(names::X0)),
                (DONE, true.into()),
            ]
        },
    );
    AsmMachine {
        name: "successor".into(),
        rules: vec![x1, x0, base],
        init: Arc::new(init_tape),
        halted: Arc::new(|s| s.get(DONE).truthy()),
        output: Arc::new(|s| s.read_tokens(TAPE, LEN)),
    }
}

const IN: &str = "in";
const IN_LEN: Loc = Loc::new("in_len");
const OUT: &str = "out";
const OUT_LEN: Loc = Loc::new("out_len");
const CALLING: Loc = Loc::new("calling");

fn init_agent(input: &[Token]) -> Result<AsmState, AsmError> {
    bin_parse(input, Order::ConstructorReverse).map_err(|e| AsmError::Malformed(e.to_string()))?;
    let mut s = AsmState::new().with(DONE, false).with(CALLING, false);
    s.load(IN, IN_LEN, input);
    Ok(s)
}

fn emit_all(prefix: &str, rest: &[Token]) -> Vec<(Loc, Value)> {
    let mut ups = vec![(Loc::at(OUT, 0), Value::tok(prefix))];
    ups.extend(
        rest.iter()
            .enumerate()
            .map(|(i, t)| (Loc::at(OUT, i + 1), Value::Token(t.clone()))),
    );
    ups.push((OUT_LEN, (rest.len() + 1).into()));
    ups.push((DONE, true.into()));
    ups
}

fn first_is(v: &StateView, tok: &str) -> bool {
    !v.flag(DONE) && !v.flag(CALLING) && v.is_token(Loc::at(IN, 0), tok)
}

/// One agent per clause application. `X1 b` waits on a child for `s b` and
/// prefixes `X0` to what it returns.
pub fn successor_rasm() -> RasmSpec {
    let x0 = GuardedRule::new(
        "X0",
        |v| first_is(v, names::X0),
        |v| emit_all(names::X1, &v.tokens(IN, IN_LEN)[1..]),
    );
    let base = GuardedRule::new(
        "01",
        |v| first_is(v, names::B01),
        |_| emit_all(names::X0, &[Token::from(names::B01)]),
    );
    let x1 = GuardedRule::new("X1", |v| first_is(v, names::X1), |_| vec![(CALLING, true.into())]);
    let back = GuardedRule::new(
        "return",
        |v| !v.flag(DONE) && v.flag(CALLING) && !v.get(RET_LEN).is_undef(),
        |v| emit_all(names::X0, &v.tokens(RET, RET_LEN)),
    );
    let machine = AsmMachine {
        name: "successor-rasm".into(),
        rules: vec![x0, base, x1, back],
        init: Arc::new(init_agent),
        halted: Arc::new(|s| s.get(DONE).truthy()),
        output: Arc::new(|s| s.read_tokens(OUT, OUT_LEN)),
    };
    RasmSpec {
        machine,
        call: CallRule {
            guard: Arc::new(|v| !v.flag(DONE) && v.flag(CALLING) && v.get(RET_LEN).is_undef()),
            argument: Arc::new(|v| v.tokens(IN, IN_LEN)[1..].to_vec()),
        },
    }
}
