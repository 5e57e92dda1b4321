use super::*;
use crate::binary::bin_value_u64;
use crate::reduce::render::parse_items;
use crate::term::join;
use crate::tree::{cat_tree, depth};

fn texts(records: &[ExampleRecord]) -> Vec<(String, String)> {
    records.iter().map(|r| (join(&r.input), join(&r.target))).collect()
}

#[test]
fn successor_range_reverse() {
    let r = gen_successor_range(1..=3, Order::ConstructorReverse).unwrap();
    assert_eq!(
        texts(&r),
        vec![
            ("01".into(), "X0 01".into()),
            ("X0 01".into(), "X1 01".into()),
            ("X1 01".into(), "X0 X0 01".into()),
        ]
    );
    assert_eq!(r[2].meta.edge_group, 1);
    assert_eq!(r[2].meta.depth, Some(2));
}

#[test]
fn successor_range_natural_and_bounds() {
    let r = gen_successor_range(1..=20, Order::Natural).unwrap();
    assert!(r.iter().all(|x| x.input[0] == "01" && x.target[0] == "01"));
    assert_eq!(join(&r[10].input), "01 X0 X1 X1");
    let big = gen_successor_range(131_072..=131_072, Order::ConstructorReverse).unwrap();
    assert_eq!(big[0].meta.bits, Some(18));
    assert_eq!(
        gen_successor_range(131_071..=131_071, Order::Natural).unwrap()[0]
            .input
            .len(),
        17
    );
    assert!(gen_successor_range(0..=3, Order::Natural).is_err());
    assert!(gen_successor_range(1..=3, Order::TreeAppendix).is_err());
    assert!(gen_successor_range(1..=(1 << 31), Order::Natural).is_err());
}

#[test]
fn successor_targets_are_the_successor() {
    for order in [Order::ConstructorReverse, Order::Natural] {
        for r in gen_successor_range(1..=500, order).unwrap() {
            let n = bin_value_u64(&crate::binary::bin_parse(&r.input, order).unwrap()).unwrap();
            let m = bin_value_u64(&crate::binary::bin_parse(&r.target, order).unwrap()).unwrap();
            assert_eq!((Some(n), m), (r.meta.value, n + 1));
        }
    }
}

#[test]
fn random_successor() {
    let a = gen_successor_random(18..=41, 1000, 9, Order::ConstructorReverse).unwrap();
    assert_eq!(a.len(), 1000);
    assert!(a.iter().all(|r| (18..=41).contains(&r.meta.bits.unwrap())));
    assert_eq!(
        a,
        gen_successor_random(18..=41, 1000, 9, Order::ConstructorReverse).unwrap()
    );
    let lengths: std::collections::BTreeSet<u32> = a.iter().map(|r| r.meta.bits.unwrap()).collect();
    assert_eq!(lengths.len(), 24);
    let two = gen_successor_random(2..=2, 1, 3, Order::ConstructorReverse).unwrap();
    assert!(["X0 01", "X1 01"].contains(&join(&two[0].input).as_str()));
    assert!(gen_successor_random(2..=2, 0, 3, Order::ConstructorReverse).is_err());
}

#[test]
fn random_excluding_avoids_training_values() {
    let r = gen_successor_random_excluding(17..=18, 500, 1, Order::Natural, Some(1..=131_072)).unwrap();
    assert!(r.iter().all(|x| x.meta.value.unwrap() > 131_072));
    assert!(gen_successor_random_excluding(2..=3, 5, 1, Order::Natural, Some(1..=100)).is_err());
}

#[test]
fn edge_records() {
    let r = gen_successor_edges(2..=4, Order::ConstructorReverse).unwrap();
    let got: Vec<(u8, u64)> = r.iter().map(|x| (x.meta.edge_group, x.meta.value.unwrap())).collect();
    assert_eq!(got, vec![(1, 3), (1, 7), (1, 15), (2, 5), (2, 11)]);
}

#[test]
fn single_step_pairs() {
    let r = gen_single_step(1..=5).unwrap();
    let t = texts(&r);
    assert!(t.contains(&("( X1 X0 01 )".into(), "X0 ( X0 01 )".into())));
    assert!(t.contains(&("( 01 )".into(), "X0 01".into())));
    assert!(t.contains(&("( X0 01 )".into(), "X1 01".into())));
    assert_eq!(r.len(), 1 + 1 + 2 + 1 + 2);
}

#[test]
fn successor_traces() {
    let r = gen_successor_traces(5..=5).unwrap();
    assert_eq!(join(&r[0].target), "( X1 X0 01 ) = X0 ( X0 01 ) = X0 X1 01");
    let base = gen_successor_traces(1..=1).unwrap();
    assert_eq!(join(&base[0].target), "( 01 ) = X0 01");
}

fn small_trees() -> TreeSpec {
    TreeSpec {
        depths: 3..=4,
        alphabet: vec!['a', 'b', 'c'],
        train_count: 200,
        test_count: 20,
        seed: 4,
    }
}

#[test]
fn tree_split_is_disjoint_and_deterministic() {
    let s = gen_trees(&small_trees()).unwrap();
    assert_eq!((s.train.len(), s.test.len()), (200, 20));
    assert!(s.overlap().is_empty());
    let depths: Vec<usize> = s.test.iter().map(depth).collect();
    assert_eq!(depths.iter().filter(|&&d| d == 3).count(), 10);
    assert!(s.train.iter().all(|t| (3..=4).contains(&depth(t))));
    assert_eq!(s, gen_trees(&small_trees()).unwrap());
    let mut keys: Vec<String> = s.train.iter().chain(&s.test).map(structure_key).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), 220);
}

#[test]
fn tree_requests_that_cannot_be_met() {
    let mut spec = small_trees();
    spec.depths = 0..=2;
    assert!(gen_trees(&spec).is_err());
    spec.depths = 1..=1;
    spec.train_count = 3;
    spec.test_count = 1;
    assert!(matches!(gen_trees(&spec), Err(DatasetError::Exhausted(_))));
    spec.alphabet.clear();
    assert!(gen_trees(&spec).is_err());
}

#[test]
fn calibration_hits_half() {
    assert_eq!(continue_probability(1), 0.5);
    assert_eq!(continue_probability(2), 0.5);
    for d in 1..=8 {
        let p = continue_probability(d);
        assert!((0.5..=0.95).contains(&p));
    }
    assert!(continue_probability(8) >= continue_probability(3));
}

#[test]
fn traversal_records() {
    let t = [cat_tree()];
    let full = gen_traversal(&t, "inorder", None, "x").unwrap();
    assert_eq!(join(&full[0].input), "a ( c LEAF LEAF ) ( t LEAF LEAF )");
    assert_eq!(join(&full[0].target), "c a t");
    assert_eq!(full[0].meta.tree_depth, Some(2));
    assert_eq!(full[0].meta.depth, Some(3));
    let k1 = gen_traversal(&t, "inorder", Some(1), "x").unwrap();
    assert_eq!(join(&k1[0].target), "UNROLL[ c LEAF LEAF ] a UNROLL[ t LEAF LEAF ]");
    assert_eq!(k1[0].task, "inorder_k1");
    assert!(parse_items(&k1[0].target).is_ok());
    let pre = gen_traversal(&t, "preorder", None, "x").unwrap();
    assert_eq!(join(&pre[0].target), "a c t");
    assert!(gen_traversal(&t, "inorder", Some(0), "x").is_err());
    assert!(gen_traversal(&t, "postorder", None, "x").is_err());
}

#[test]
fn traversal_traces_have_depth_plus_two_states() {
    let s = gen_trees(&small_trees()).unwrap();
    for r in gen_traversal_traces(&s.test, "inorder", "t").unwrap() {
        let states = r.target.iter().filter(|t| *t == "->").count() + 1;
        assert_eq!(states, r.meta.tree_depth.unwrap() + 2);
    }
}

#[test]
fn padding_round_trip() {
    let mut r = gen_successor_range(1..=50, Order::Natural).unwrap();
    let orig = r.clone();
    apply_padding(&mut r, 0, PAD, 1);
    assert_eq!(r, orig);
    apply_padding(&mut r, 4, PAD, 1);
    assert!(r.iter().any(|x| x.meta.pad_len > 0));
    for (p, o) in r.iter().zip(&orig) {
        let n = p.meta.pad_len;
        assert!(n <= 4);
        assert!(p.input[..n].iter().chain(&p.target[..n]).all(|t| t == PAD));
        assert_eq!(p.input.len(), o.input.len() + n);
        assert_eq!(strip_padding(p), *o);
    }
}

#[test]
fn oversampling_counts() {
    let r = gen_successor_range(1..=300, Order::ConstructorReverse).unwrap();
    let o = oversample(&r, 5, 2, 1).unwrap();
    let count = |id: &str| o.iter().filter(|x| x.id == id).count();
    for x in &r {
        let want = match x.meta.edge_group {
            1 => 5,
            2 => 2,
            _ => 1,
        };
        assert_eq!(count(&x.id), want);
    }
    let same = oversample(&r, 1, 1, 1).unwrap();
    let mut a: Vec<_> = same.iter().map(|x| x.id.clone()).collect();
    let mut b: Vec<_> = r.iter().map(|x| x.id.clone()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
    assert!(oversample(&r, 0, 1, 1).is_err());
}

#[test]
fn upweighting_sets_weights() {
    let mut r = gen_successor_range(1..=20, Order::ConstructorReverse).unwrap();
    upweight(&mut r, 5, 3).unwrap();
    for x in &r {
        assert_eq!(x.meta.weight, [1, 5, 3][x.meta.edge_group as usize]);
    }
}

#[test]
fn remapping_keeps_structure_tokens() {
    let mut r = gen_single_step(5..=5).unwrap();
    let sigma = crate::remap::VocabRemap::parse("X0=a,X1=b,01=c").unwrap();
    remap_records(&mut r, &sigma).unwrap();
    assert_eq!(join(&r[0].input), "( b a c )");
    assert_eq!(join(&r[0].target), "a ( a c )");
    let clash = crate::remap::VocabRemap::parse("X0=(").unwrap();
    assert!(remap_records(&mut r, &clash).is_err());
}

#[test]
fn jsonl_round_trip() {
    let r = gen_successor_range(1..=100, Order::Natural).unwrap();
    let text = to_jsonl(&r);
    assert_eq!(parse_jsonl::<ExampleRecord>(&text).unwrap(), r);
    let first = text.lines().next().unwrap();
    assert_eq!(
        first,
        r#"{"id":"successor-natural-1","task":"successor","order":"natural","input":["01"],"target":["01","X0"],"meta":{"value":1,"bits":1,"depth":1,"edge_group":0,"weight":1}}"#
    );
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.jsonl");
    write_jsonl(&r, &p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), text);
    assert_eq!(read_jsonl::<ExampleRecord>(&p).unwrap(), r);
}

#[test]
fn jsonl_errors_carry_line_numbers() {
    let r = gen_successor_range(1..=2, Order::Natural).unwrap();
    let text = format!("{}{{\"id\": 3}}\n", to_jsonl(&r));
    match parse_jsonl::<ExampleRecord>(&text) {
        Err(JsonlError::Schema { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        read_jsonl::<ExampleRecord>(std::path::Path::new("/nonexistent/x.jsonl")),
        Err(JsonlError::Io { .. })
    ));
}

#[test]
fn generate_successor_splits() {
    let mut spec = DatasetSpec::new(Task::Successor);
    spec.values = Some(1..=1000);
    spec.random_bits = Some(9..=12);
    spec.random_count = 50;
    spec.edge_bits = Some(2..=12);
    spec.k1 = 5;
    let splits = generate(&spec).unwrap();
    let names: Vec<&str> = splits.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["train", "random", "edge"]);
    assert_eq!(splits[0].records.len(), 1000 + 4 * 8);
    assert!(splits[1].records.iter().all(|r| r.meta.value.unwrap() > 1000));
    let edge: Vec<u64> = splits[2].records.iter().map(|r| r.meta.value.unwrap()).collect();
    assert_eq!(edge, vec![1023, 2047, 4095, 1535, 3071]);
    assert_eq!(generate(&spec).unwrap(), splits);
}

#[test]
fn generate_tree_splits() {
    let mut spec = DatasetSpec::new(Task::Inorder);
    spec.depths = 2..=3;
    spec.train_count = 100;
    spec.test_count = 10;
    spec.k = Some(2);
    spec.pad_max = 2;
    let splits = generate(&spec).unwrap();
    assert_eq!(splits[0].records.len(), 100);
    assert_eq!(splits[1].records[0].task, "inorder_k2");
    spec.order = Order::Natural;
    assert!(generate(&spec).is_err());
    let mut bad = DatasetSpec::new(Task::SuccessorStep);
    assert!(generate(&bad).is_err());
    bad.values = Some(1..=3);
    bad.k = Some(1);
    assert!(generate(&bad).is_err());
}

#[test]
fn task_names_parse() {
    for t in Task::ALL {
        assert_eq!(t.name().parse::<Task>().unwrap(), t);
    }
    assert!("postorder".parse::<Task>().is_err());
}
