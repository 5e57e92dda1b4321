use super::*;
use crate::term::{join, tokens};

const NAT_F: ShortcutKind = ShortcutKind {
    order: Order::Natural,
    mode: Mode::Faithful,
};
const REV_F: ShortcutKind = ShortcutKind {
    order: Order::ConstructorReverse,
    mode: Mode::Faithful,
};

fn nat(text: &str, mode: Mode) -> String {
    join(&emulate_natural(&tokens(text), mode).unwrap())
}

fn rev(text: &str, mode: Mode) -> String {
    join(&emulate_reverse(&tokens(text), mode).unwrap())
}

#[test]
fn natural_examples() {
    assert_eq!(nat("01 X0 X1 X1", Mode::Faithful), "01 X1 X0 X0");
    assert_eq!(nat("01 X1 X1", Mode::Faithful), "01 X0 X0");
    assert_eq!(nat("01 X1 X1", Mode::Corrected), "01 X0 X0 X0");
    assert_eq!(nat("01", Mode::Faithful), "01 X0");
    assert_eq!(nat("01", Mode::Corrected), "01 X0");
}

#[test]
fn reverse_examples() {
    assert_eq!(rev("X1 X1 X0 01", Mode::Faithful), "X0 X0 X1 01");
    assert_eq!(rev("X0 01", Mode::Faithful), "X1 01");
    assert_eq!(rev("X1 X1 01", Mode::Faithful), "X0 X0 01");
    assert_eq!(rev("X1 X1 01", Mode::Corrected), "X0 X0 X0 01");
    assert_eq!(rev("01", Mode::Faithful), "X0 01");
}

#[test]
fn malformed_inputs() {
    assert!(emulate_natural(&tokens("X0 01"), Mode::Faithful).is_err());
    assert!(emulate_reverse(&tokens("01 X0"), Mode::Faithful).is_err());
    assert!(emulate_reverse(&[], Mode::Corrected).is_err());
    assert!(ShortcutKind::new(Order::TreeAppendix, Mode::Faithful).is_err());
}

#[test]
fn edge_groups() {
    let [g1, g2] = edge_inputs(2..=5).unwrap();
    let vals = |g: &EdgeCaseGroup| g.members.iter().map(|m| m.value).collect::<Vec<_>>();
    assert_eq!(vals(&g1), vec![3, 7, 15, 31]);
    assert_eq!(vals(&g2), vec![5, 11, 23]);
    assert_eq!(join(&g1.members[1].tokens), "X1 X1 01");
    assert_eq!(join(&g2.members[0].tokens), "X1 X0 01");
    assert_eq!(join(&g1.members[0].tokens), "X1 01");
    #[allow(clippy::reversed_empty_ranges)]
    let empty = 3..=2;
    assert!(matches!(edge_inputs(empty), Err(ShortcutError::EmptyRange)));
    for m in g1.members.iter().chain(&g2.members) {
        assert!(edge_group(m.value) == 1 || edge_group(m.value) == 2);
    }
}

#[test]
fn edge_group_matches_final_rule() {
    // Group 1 traces end with the 01 clause, group 2 with the X0 clause right
    // after a run of X1 steps that starts at the first token.
    for n in 1..=2048u64 {
        let toks = bin_tokens(n, Order::ConstructorReverse).unwrap();
        let ones = toks.iter().take_while(|t| *t == "X1").count();
        let rest: Vec<_> = toks[ones..].iter().map(Token::as_str).collect();
        let want = match (ones, rest.as_slice()) {
            (k, ["01"]) if k >= 1 => 1,
            (k, ["X0", "01"]) if k >= 1 => 2,
            _ => 0,
        };
        assert_eq!(edge_group(n), want, "n={n}");
    }
}

#[test]
fn faithful_natural_fails_exactly_on_group_one() {
    let report = diff_against_oracle(NAT_F, 1..=1024);
    assert_eq!(report.checked, 1024);
    let bad: Vec<u64> = report.disagreements.iter().map(|d| d.value).collect();
    let group1: Vec<u64> = (2..=10).map(|l| (1u64 << l) - 1).collect();
    assert_eq!(bad, group1);
    assert!(report
        .disagreements
        .iter()
        .all(|d| d.class == FailureSignature::OneTokenShort));
}

#[test]
fn faithful_reverse_fails_exactly_on_group_one() {
    let report = diff_against_oracle(REV_F, 1..=1024);
    assert!(report
        .disagreements
        .iter()
        .all(|d| d.edge_group == 1 && d.class == FailureSignature::OneTokenShort));
    assert_eq!(report.disagreements.len(), 9);
}

#[test]
fn corrected_never_disagrees() {
    for order in [Order::Natural, Order::ConstructorReverse] {
        let kind = ShortcutKind::new(order, Mode::Corrected).unwrap();
        assert!(diff_against_oracle(kind, 1..=1024).disagreements.is_empty());
    }
}

#[test]
fn guards_only_read_positions_and_flags() {
    for kind in [
        NAT_F,
        REV_F,
        ShortcutKind::new(Order::Natural, Mode::Corrected).unwrap(),
        ShortcutKind::new(Order::ConstructorReverse, Mode::Corrected).unwrap(),
    ] {
        for n in 1..=300u64 {
            let (_, run) = emulate_logged(kind, &bin_tokens(n, kind.order).unwrap()).unwrap();
            audit_guards(kind, &run).unwrap();
        }
    }
}

#[test]
fn at_most_one_rule_fires() {
    for n in 1..=300u64 {
        for kind in [NAT_F, REV_F] {
            let (_, run) = emulate_logged(kind, &bin_tokens(n, kind.order).unwrap()).unwrap();
            assert!(run.log.iter().all(|r| r.fired.len() == 1));
        }
    }
}

#[test]
fn report_formats() {
    let r = diff_against_oracle(NAT_F, 1..=16);
    let jsonl = r.to_jsonl();
    assert_eq!(jsonl.lines().count(), 3);
    assert!(jsonl.starts_with(r#"{"value":3,"bits":2,"edge_group":1,"#), "{jsonl}");
    assert!(jsonl.contains(r#""class":"one-token-short""#));
    let table = r.summary_table();
    assert!(table.starts_with("natural faithful shortcut vs oracle, values 1..=16: 16 checked, 3 disagree"));
    assert_eq!(table.lines().count(), 5);
}
