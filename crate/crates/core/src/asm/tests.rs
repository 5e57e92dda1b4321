use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::successor::{DONE, EMIT, POS, TAPE};
use super::*;
use crate::binary::{bin_encode, bin_tokens, trailing_ones_below_msb};
use crate::reduce::{builtin_programs, Expr};
use crate::term::{join, linearize, tokens, Order};
use crate::tree::{cat_tree, enumerate_trees, tree_serialize};

fn oracle_succ(n: u64) -> String {
    let e = Expr::apply("s", &[bin_encode(n).unwrap()]);
    let r = builtin_programs().evaluate(&e).unwrap();
    linearize(&r.to_term().unwrap()).text()
}

fn run(m: &AsmMachine, text: &str) -> AsmRun {
    asm_run(m, &tokens(text), DEFAULT_BUDGET).unwrap()
}

#[test]
fn successor_asm_examples() {
    let m = successor_asm();
    let r = run(&m, "X0 01");
    assert_eq!(join(&(m.output)(&r.state)), "X1 01");
    assert_eq!(r.steps, 1);
    let r = run(&m, "X1 X0 01");
    assert_eq!(join(&(m.output)(&r.state)), oracle_succ(5));
    assert_eq!(join(&(m.output)(&r.state)), "X0 X1 01");
    let r = run(&m, "X1 X1 01");
    assert_eq!(join(&(m.output)(&r.state)), "X0 X0 X0 01");
}

#[test]
fn head_x0_writes_emit_and_done() {
    let m = successor_asm();
    let s = AsmState::new()
        .with(Loc::at(TAPE, 0), Value::tok("X0"))
        .with(Loc::at(TAPE, 1), Value::tok("01"))
        .with(POS, 0usize)
        .with(DONE, false);
    let (next, rec) = asm_step_logged(&m, &s, 1).unwrap();
    assert!(next.get(EMIT).is_token("X1"));
    assert!(next.get(DONE).truthy());
    assert_eq!(rec.fired, vec!["X0"]);
}

#[test]
fn halted_input_runs_zero_steps() {
    let m = successor_asm();
    let s = (m.init)(&tokens("X0 01")).unwrap().with(DONE, true);
    assert_eq!(asm_run_from(&m, s, 1).unwrap().steps, 0);
}

#[test]
fn malformed_input_rejected() {
    for bad in ["", "X1 X0", "01 X1", "X2 01"] {
        assert!(
            matches!(asm_run(&successor_asm(), &tokens(bad), 10), Err(AsmError::Malformed(_))),
            "{bad}"
        );
    }
}

#[test]
fn successor_asm_matches_reduction() {
    let m = successor_asm();
    for n in 1..=1024u64 {
        let input = bin_tokens(n, Order::ConstructorReverse).unwrap();
        let r = asm_run(&m, &input, DEFAULT_BUDGET).unwrap();
        assert_eq!(join(&(m.output)(&r.state)), oracle_succ(n), "n={n}");
        assert_eq!(r.steps as u32, trailing_ones_below_msb(n) + 1);
        assert!(r.log.iter().all(|rec| rec.fired.len() <= 2));
    }
}

#[test]
fn rule_order_is_irrelevant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base = successor_asm();
    let mut idx: Vec<usize> = (0..base.rules.len()).collect();
    for n in 1..=300u64 {
        idx.shuffle(&mut rng);
        let shuffled = base.with_rule_order(&idx);
        let mut a = (base.init)(&bin_tokens(n, Order::ConstructorReverse).unwrap()).unwrap();
        let mut b = a.clone();
        while !(base.halted)(&a) {
            a = asm_step(&base, &a).unwrap();
            b = asm_step(&shuffled, &b).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn rasm_examples() {
    let spec = successor_rasm();
    let r = rasm_run(&spec, &tokens("01"), DEFAULT_BUDGET).unwrap();
    assert_eq!((join(&r.output).as_str(), r.children), ("X0 01", 0));
    let r = rasm_run(&spec, &tokens("X1 X1 X0 01"), DEFAULT_BUDGET).unwrap();
    assert_eq!((join(&r.output).as_str(), r.children), ("X0 X0 X1 01", 2));
    assert_eq!(r.max_depth, 2);
}

#[test]
fn rasm_matches_reduction_and_depth() {
    let spec = successor_rasm();
    for n in 1..=1024u64 {
        let t = bin_encode(n).unwrap();
        let r = rasm_run(&spec, &linearize(&t).tokens, DEFAULT_BUDGET).unwrap();
        assert_eq!(join(&r.output), oracle_succ(n));
        let depth = builtin_programs().recursion_depth("s", &[t]).unwrap();
        assert_eq!(r.children, depth - 1);
        assert_eq!(r.children as u32, trailing_ones_below_msb(n));
    }
}

#[test]
fn traversal_rasm_matches_reduction() {
    for func in ["inorder", "preorder"] {
        let spec = traversal_rasm(func).unwrap();
        let mut trees = enumerate_trees(3, &['a', 'b']);
        trees.push(cat_tree());
        for t in trees {
            let input = traversal::agent_input(&t);
            let r = rasm_run(&spec, &input, DEFAULT_BUDGET).unwrap();
            let want = builtin_programs()
                .normalize(&Expr::apply(func, std::slice::from_ref(&t)))
                .unwrap()
                .result;
            assert_eq!(r.output, want.as_list().unwrap());
            assert_eq!(r.children, 2 * crate::tree::node_count(&t));
        }
    }
    let r = rasm_run(
        &traversal_rasm("inorder").unwrap(),
        &tree_serialize(&cat_tree()).unwrap().tokens,
        100,
    )
    .unwrap();
    assert_eq!(join(&r.output), "c a t");
    assert!(traversal_rasm("postorder").is_err());
}

#[test]
fn log_is_printable() {
    let r = run(&successor_asm(), "X1 X0 01");
    let text = r.log_text();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("step 1: [X1] pos:=1 tape(0):=X0"), "{text}");
    let json = serde_json::to_string(&r.log[0]).unwrap();
    assert!(json.contains("\"fired\":[\"X1\"]"), "{json}");
}
