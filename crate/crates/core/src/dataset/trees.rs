use std::collections::HashSet;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{record_rng, DatasetError, ExampleRecord, Meta};
use crate::reduce::render::{render_trace_tokens, unroll_state, TraceStyle};
use crate::reduce::{builtin, builtin_programs, Expr};
use crate::term::{Order, Term};
use crate::tree::{branch, count_trees, depth, leaf, tree_serialize};

pub const DEFAULT_ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub depths: RangeInclusive<usize>,
    pub alphabet: Vec<char>,
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
}

impl Default for TreeSpec {
    fn default() -> Self {
        TreeSpec {
            depths: 5..=6,
            alphabet: DEFAULT_ALPHABET.chars().collect(),
            train_count: 20_000,
            test_count: 1_000,
            seed: super::DEFAULT_SEED,
        }
    }
}

/// Train and test trees with no serialized structure in common.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSplit {
    pub train: Vec<Term>,
    pub test: Vec<Term>,
}

impl TreeSplit {
    /// Serialized structures present in both splits.
    pub fn overlap(&self) -> Vec<String> {
        let test: HashSet<String> = self.test.iter().map(structure_key).collect();
        self.train
            .iter()
            .map(structure_key)
            .filter(|k| test.contains(k))
            .collect()
    }
}

/// Shape plus labels, as serialized text.
pub fn structure_key(t: &Term) -> String {
    tree_serialize(t).map(|s| s.text()).unwrap_or_default()
}

/// Probability that a branch with `levels` levels below and including it
/// reaches the full depth, when each child slot above the last level is a
/// branch with probability `p`.
fn reach_probability(p: f64, levels: usize) -> f64 {
    let mut r = 1.0;
    for _ in 1..levels {
        r = 1.0 - (1.0 - p * r).powi(2);
    }
    r
}

/// The smallest continue probability in 0.50, 0.55, ..., 0.95 that reaches
/// `target_depth` at least half the time.
pub fn continue_probability(target_depth: usize) -> f64 {
    (10..=19)
        .map(|i| i as f64 * 0.05)
        .find(|&p| reach_probability(p, target_depth) >= 0.5)
        .unwrap_or(0.95)
}

fn grow(rng: &mut impl Rng, alphabet: &[char], p: f64, levels_left: usize) -> Term {
    let v = *alphabet.choose(rng).expect("non-empty alphabet");
    let l = grow_child(rng, alphabet, p, levels_left);
    let r = grow_child(rng, alphabet, p, levels_left);
    branch(v, l, r)
}

fn grow_child(rng: &mut impl Rng, alphabet: &[char], p: f64, levels_left: usize) -> Term {
    if levels_left > 1 && rng.gen_bool(p) {
        grow(rng, alphabet, p, levels_left - 1)
    } else {
        leaf()
    }
}

fn per_depth(total: usize, depths: &RangeInclusive<usize>) -> Vec<(usize, usize)> {
    let ds: Vec<usize> = depths.clone().collect();
    let base = total / ds.len();
    let extra = total % ds.len();
    ds.into_iter()
        .enumerate()
        .map(|(i, d)| (d, base + usize::from(i < extra)))
        .collect()
}

const TEST_STREAM: u64 = 0x7e57;
const TRAIN_STREAM: u64 = 0x7ea1;

fn draw(
    spec: &TreeSpec,
    stream: u64,
    d: usize,
    want: usize,
    seen: &mut HashSet<String>,
    out: &mut Vec<Term>,
) -> Result<(), DatasetError> {
    let p = continue_probability(d);
    let cap = 200 * want + 10_000;
    let mut got = 0;
    let seed = spec.seed ^ stream.rotate_left(32) ^ (d as u64).rotate_left(48);
    for attempt in 0..cap {
        if got == want {
            return Ok(());
        }
        let mut rng = record_rng(seed, attempt as u64);
        let t = grow(&mut rng, &spec.alphabet, p, d);
        if depth(&t) != d || !seen.insert(structure_key(&t)) {
            continue;
        }
        out.push(t);
        got += 1;
    }
    if got == want {
        Ok(())
    } else {
        Err(DatasetError::Exhausted(format!(
            "found {got} of {want} distinct depth-{d} trees in {cap} attempts"
        )))
    }
}

/// Sample distinct trees of each depth in `spec.depths`, test split first.
/// Counts are divided evenly across depths.
pub fn gen_trees(spec: &TreeSpec) -> Result<TreeSplit, DatasetError> {
    if spec.alphabet.is_empty() {
        return Err(DatasetError::Range("alphabet is empty".into()));
    }
    if spec.depths.is_empty() || *spec.depths.start() == 0 {
        return Err(DatasetError::Range(
            "depth range must be non-empty and start at 1 or more (a lone leaf carries no value)".into(),
        ));
    }
    let train = per_depth(spec.train_count, &spec.depths);
    let test = per_depth(spec.test_count, &spec.depths);
    for ((d, a), (_, b)) in train.iter().zip(&test) {
        let available = count_trees(*d..=*d, spec.alphabet.len());
        if available < BigUint::from(a + b) {
            return Err(DatasetError::Exhausted(format!(
                "{} depth-{d} trees requested, only {available} exist",
                a + b
            )));
        }
    }
    let mut seen = HashSet::new();
    let mut split = TreeSplit {
        train: Vec::new(),
        test: Vec::new(),
    };
    for &(d, n) in &test {
        draw(spec, TEST_STREAM, d, n, &mut seen, &mut split.test)?;
    }
    for &(d, n) in &train {
        draw(spec, TRAIN_STREAM, d, n, &mut seen, &mut split.train)?;
    }
    Ok(split)
}

fn traversal_func(func: &str) -> Result<&'static str, DatasetError> {
    match func {
        builtin::INORDER => Ok(builtin::INORDER),
        builtin::PREORDER => Ok(builtin::PREORDER),
        other => Err(DatasetError::Task(other.to_owned())),
    }
}

fn tree_meta(t: &Term) -> Meta {
    Meta {
        depth: Some(depth(t) + 1),
        tree_depth: Some(depth(t)),
        ..Meta::default()
    }
}

/// Traversal records. With `k = None` the target is the value sequence;
/// with `Some(k)` it is the state after `k` levels in the UNROLL grammar.
pub fn gen_traversal(
    trees: &[Term],
    func: &str,
    k: Option<usize>,
    id_prefix: &str,
) -> Result<Vec<ExampleRecord>, DatasetError> {
    let func = traversal_func(func)?;
    if k == Some(0) {
        return Err(DatasetError::Range("k must be at least 1".into()));
    }
    let task = match k {
        None => func.to_owned(),
        Some(k) => format!("{func}_k{k}"),
    };
    trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let input = tree_serialize(t)
                .map_err(|e| DatasetError::Range(e.to_string()))?
                .tokens;
            let e = Expr::apply(func, std::slice::from_ref(t));
            let target = match k {
                None => {
                    let r = builtin_programs().evaluate(&e).expect("traversal terminates");
                    r.as_list().expect("traversal yields a list").to_vec()
                }
                Some(k) => {
                    let p = builtin_programs().reduce_k(&e, k).expect("traversal terminates");
                    unroll_state(&p.expr).expect("traversal state renders")
                }
            };
            Ok(ExampleRecord {
                id: format!("{id_prefix}-{task}-{i:06}"),
                task: task.clone(),
                order: Order::TreeAppendix,
                input,
                target,
                meta: tree_meta(t),
            })
        })
        .collect()
}

/// Full arrow-style traces of a traversal, one per tree.
pub fn gen_traversal_traces(trees: &[Term], func: &str, id_prefix: &str) -> Result<Vec<ExampleRecord>, DatasetError> {
    let func = traversal_func(func)?;
    trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let input = tree_serialize(t)
                .map_err(|e| DatasetError::Range(e.to_string()))?
                .tokens;
            let trace = builtin_programs()
                .normalize(&Expr::apply(func, std::slice::from_ref(t)))
                .expect("traversal terminates");
            Ok(ExampleRecord {
                id: format!("{id_prefix}-{func}_trace-{i:06}"),
                task: format!("{func}_trace"),
                order: Order::TreeAppendix,
                input,
                target: render_trace_tokens(&trace, TraceStyle::Arrow).expect("traversal states render"),
                meta: tree_meta(t),
            })
        })
        .collect()
}
