use proptest::prelude::*;

use strec::asm::{asm_run, successor_asm, DEFAULT_BUDGET};
use strec::binary::{bin_encode, bin_tokens, bin_value_u64, peano, peano_value};
use strec::dataset::{apply_padding, gen_successor_range, parse_jsonl, strip_padding, to_jsonl, ExampleRecord};
use strec::eval::{hit_at_k, PredictionRecord};
use strec::reduce::render::{expand_items, items_normal, traversal_items};
use strec::reduce::{builtin_programs, Expr};
use strec::remap::{remap_tokens, VocabRemap};
use strec::shortcut::{emulate, oracle_successor, Mode, ShortcutKind};
use strec::term::{
    bin_pos_def, char_tree_def, delinearize, linearize, peano_def, reorder, Order, Term, Token, TokenSeq,
};
use strec::tree::{branch, leaf, tree_parse, tree_serialize};

fn tree(max_depth: u32) -> impl Strategy<Value = Term> {
    let leaf = Just(leaf());
    leaf.prop_recursive(max_depth, 64, 2, |inner| {
        (prop::char::range('a', 'd'), inner.clone(), inner).prop_map(|(v, l, r)| branch(v, l, r))
    })
}

fn non_leaf_tree() -> impl Strategy<Value = Term> {
    (prop::char::range('a', 'd'), tree(4), tree(4)).prop_map(|(v, l, r)| branch(v, l, r))
}

proptest! {
    #[test]
    fn binary_linearization_round_trips(n in 1u64..) {
        let t = bin_encode(n).unwrap();
        let seq = linearize(&t);
        prop_assert_eq!(delinearize(&seq, &bin_pos_def()).unwrap(), t.clone());
        prop_assert_eq!(bin_value_u64(&t).unwrap(), n);
    }

    #[test]
    fn peano_linearization_round_trips(n in 1u64..300) {
        let t = peano(n).unwrap();
        prop_assert_eq!(delinearize(&linearize(&t), &peano_def()).unwrap(), t.clone());
        prop_assert_eq!(peano_value(&t).unwrap(), n);
    }

    #[test]
    fn tree_linearization_round_trips(t in tree(5)) {
        prop_assert_eq!(delinearize(&linearize(&t), &char_tree_def()).unwrap(), t);
    }

    #[test]
    fn reorder_is_an_involution(n in 1u64..) {
        let seq = linearize(&bin_encode(n).unwrap());
        let natural = reorder(&seq, Order::Natural).unwrap();
        prop_assert_eq!(natural.tokens.len(), seq.tokens.len());
        prop_assert_eq!(reorder(&natural, Order::ConstructorReverse).unwrap(), seq);
    }

    #[test]
    fn tree_serialization_round_trips(t in non_leaf_tree()) {
        let s = tree_serialize(&t).unwrap();
        prop_assert_eq!(tree_parse(&s.tokens).unwrap(), t);
    }

    #[test]
    fn remap_then_inverse_is_identity(n in 1u64.., perm in Just(["a", "b", "c"]).prop_shuffle()) {
        let sigma = VocabRemap::new(
            ["X0", "X1", "01"].iter().zip(perm.iter()).map(|(f, t)| (Token::from(*f), Token::from(*t))),
        )
        .unwrap();
        let seq = linearize(&bin_encode(n).unwrap());
        let there = remap_tokens(&seq, &sigma).unwrap();
        prop_assert_eq!(remap_tokens(&there, &sigma.inverse()).unwrap(), seq);
    }

    #[test]
    fn each_level_expands_every_pending_item(t in non_leaf_tree(), pre in any::<bool>()) {
        let func = if pre { "preorder" } else { "inorder" };
        let p = builtin_programs();
        let mut e = Expr::apply(func, &[t]);
        let mut items = traversal_items(&e).unwrap();
        while let Some(step) = p.step_level(&e).unwrap() {
            items = expand_items(func, &items);
            prop_assert_eq!(&traversal_items(&step.after).unwrap(), &items);
            e = step.after;
        }
        prop_assert!(items_normal(&items));
    }

    #[test]
    fn hit_at_k_never_decreases(
        hits in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..6), 1..30),
    ) {
        let mut gold = Vec::new();
        let mut preds = Vec::new();
        for (i, row) in hits.iter().enumerate() {
            let target = vec![Token::from("X0"), Token::from("01")];
            let wrong = vec![Token::from("X1"), Token::from("01")];
            let id = format!("r{i}");
            let cands = row.iter().map(|&h| if h { target.clone() } else { wrong.clone() }).collect();
            preds.push(PredictionRecord::new(&id, cands));
            gold.push(ExampleRecord {
                id,
                task: "successor".into(),
                order: Order::ConstructorReverse,
                input: target.clone(),
                target,
                meta: Default::default(),
            });
        }
        let mut last = 0.0;
        for k in 1..=7 {
            let h = hit_at_k(&preds, &gold, k).unwrap();
            prop_assert!(h >= last);
            last = h;
        }
    }

    #[test]
    fn successor_asm_ignores_rule_order(n in 1u64..(1 << 40), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let m = successor_asm();
        let shuffled = m.with_rule_order(&perm);
        let input = bin_tokens(n, Order::ConstructorReverse).unwrap();
        let a = asm_run(&m, &input, DEFAULT_BUDGET).unwrap();
        let b = asm_run(&shuffled, &input, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!((m.output)(&a.state), (shuffled.output)(&b.state));
        prop_assert_eq!(a.log, b.log);
    }

    #[test]
    fn corrected_shortcuts_match_reduction(n in 1u64..(1 << 40), natural in any::<bool>()) {
        let order = if natural { Order::Natural } else { Order::ConstructorReverse };
        let kind = ShortcutKind::new(order, Mode::Corrected).unwrap();
        let input = bin_tokens(n, order).unwrap();
        prop_assert_eq!(emulate(kind, &input).unwrap(), oracle_successor(n, order));
    }

    #[test]
    fn padding_strips_back(start in 1u64..5000, max in 0usize..6, seed in any::<u64>()) {
        let plain = gen_successor_range(start..=start + 20, Order::Natural).unwrap();
        let mut padded = plain.clone();
        apply_padding(&mut padded, max, "PAD", seed);
        for (p, r) in padded.iter().zip(&plain) {
            prop_assert!(p.meta.pad_len <= max);
            prop_assert_eq!(&strip_padding(p), r);
        }
        let back: Vec<ExampleRecord> = parse_jsonl(&to_jsonl(&padded)).unwrap();
        prop_assert_eq!(back, padded);
    }
}

#[test]
fn token_sequences_keep_their_order_tag() {
    let seq = TokenSeq::parse("X1 X0 01", Order::ConstructorReverse);
    assert_eq!(reorder(&seq, Order::Natural).unwrap().text(), "01 X0 X1");
}
