//! Tree traversals as recursive machines: a branch agent calls a child on its
//! left subtree, then on its right subtree, and assembles the two results
//! around its own value.

use std::sync::Arc;

use super::machine::{AsmError, AsmMachine, GuardedRule};
use super::rasm::{CallRule, RasmSpec, RET, RET_LEN};
use super::store::{AsmState, Loc, StateView, Value};
use crate::reduce::builtin;
use crate::term::{Term, Token};
use crate::tree::{leaf, tree_parse, tree_serialize, TreeError, LEAF_TOKEN};

const IN: &str = "in";
const IN_LEN: Loc = Loc::new("in_len");
const ACC: &str = "acc";
const ACC_LEN: Loc = Loc::new("acc_len");
const OUT: &str = "out";
const OUT_LEN: Loc = Loc::new("out_len");
const PHASE: Loc = Loc::new("phase");
const DONE: Loc = Loc::new("done");

const START: usize = 0;
const LEFT: usize = 1;
const RIGHT: usize = 2;

/// Agent input for a subtree: its serialization, or a lone `LEAF`.
pub fn agent_input(t: &Term) -> Vec<Token> {
    match tree_serialize(t) {
        Ok(seq) => seq.tokens,
        Err(_) => vec![Token::from(LEAF_TOKEN)],
    }
}

fn parse_input(input: &[Token]) -> Result<Term, TreeError> {
    match input {
        [t] if t == LEAF_TOKEN => Ok(leaf()),
        _ => tree_parse(input),
    }
}

fn init(input: &[Token]) -> Result<AsmState, AsmError> {
    parse_input(input).map_err(|e| AsmError::Malformed(e.to_string()))?;
    let mut s = AsmState::new().with(PHASE, START).with(DONE, false);
    s.load(IN, IN_LEN, input);
    Ok(s)
}

fn child_tokens(v: &StateView, which: usize) -> Vec<Token> {
    let t = parse_input(&v.tokens(IN, IN_LEN)).expect("validated at init");
    agent_input(&t.children[which])
}

fn phase(v: &StateView, p: usize) -> bool {
    !v.flag(DONE) && v.nat(PHASE) == p
}

/// `func` is `inorder` or `preorder`.
pub fn traversal_rasm(func: &str) -> Result<RasmSpec, AsmError> {
    let pre = match func {
        builtin::PREORDER => true,
        builtin::INORDER => false,
        other => return Err(AsmError::Malformed(format!("no traversal named `{other}`"))),
    };
    let leaf = GuardedRule::new(
        "Leaf",
        |v| phase(v, START) && v.is_token(Loc::at(IN, 0), LEAF_TOKEN),
        |_| vec![(OUT_LEN, 0usize.into()), (DONE, true.into())],
    );
    let branch = GuardedRule::new(
        "Branch",
        |v| phase(v, START) && !v.is_token(Loc::at(IN, 0), LEAF_TOKEN),
        |_| vec![(PHASE, LEFT.into())],
    );
    let left_back = GuardedRule::new(
        "left-return",
        |v| phase(v, LEFT) && !v.get(RET_LEN).is_undef(),
        |v| {
            let got = v.tokens(RET, RET_LEN);
            let mut ups: Vec<(Loc, Value)> = got
                .iter()
                .enumerate()
                .map(|(i, t)| (Loc::at(ACC, i), Value::Token(t.clone())))
                .collect();
            ups.push((ACC_LEN, got.len().into()));
            ups.push((RET_LEN, Value::Undef));
            ups.push((PHASE, RIGHT.into()));
            ups
        },
    );
    let right_back = GuardedRule::new(
        "right-return",
        |v| phase(v, RIGHT) && !v.get(RET_LEN).is_undef(),
        move |v| {
            let value = v.get(Loc::at(IN, 0)).as_token().cloned().expect("branch value");
            let left = v.tokens(ACC, ACC_LEN);
            let right = v.tokens(RET, RET_LEN);
            let out: Vec<Token> = if pre {
                std::iter::once(value).chain(left).chain(right).collect()
            } else {
                left.into_iter().chain(std::iter::once(value)).chain(right).collect()
            };
            let mut ups: Vec<(Loc, Value)> = out
                .iter()
                .enumerate()
                .map(|(i, t)| (Loc::at(OUT, i), Value::Token(t.clone())))
                .collect();
            ups.push((OUT_LEN, out.len().into()));
            ups.push((DONE, true.into()));
            ups
        },
    );
    let machine = AsmMachine {
        name: format!("{func}-rasm"),
        rules: vec![leaf, branch, left_back, right_back],
        init: Arc::new(init),
        halted: Arc::new(|s| s.get(DONE).truthy()),
        output: Arc::new(|s| s.read_tokens(OUT, OUT_LEN)),
    };
    Ok(RasmSpec {
        machine,
        call: CallRule {
            guard: Arc::new(|v| !v.flag(DONE) && matches!(v.nat(PHASE), LEFT | RIGHT) && v.get(RET_LEN).is_undef()),
            argument: Arc::new(|v| child_tokens(v, v.nat(PHASE) - 1)),
        },
    })
}
