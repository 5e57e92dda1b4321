use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::successor::{
    gen_single_step, gen_successor_edges, gen_successor_random_excluding, gen_successor_range, gen_successor_traces,
};
use super::transform::{apply_padding, oversample, remap_records, upweight, PAD};
use super::trees::{gen_traversal, gen_traversal_traces, gen_trees, TreeSpec, DEFAULT_ALPHABET};
use super::{DatasetError, ExampleRecord, DEFAULT_SEED};
use crate::reduce::builtin;
use crate::remap::VocabRemap;
use crate::term::Order;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Successor,
    SuccessorStep,
    SuccessorTrace,
    Preorder,
    Inorder,
    PreorderTrace,
    InorderTrace,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Successor,
        Task::SuccessorStep,
        Task::SuccessorTrace,
        Task::Preorder,
        Task::Inorder,
        Task::PreorderTrace,
        Task::InorderTrace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Successor => "successor",
            Task::SuccessorStep => "successor_step",
            Task::SuccessorTrace => "successor_trace",
            Task::Preorder => "preorder",
            Task::Inorder => "inorder",
            Task::PreorderTrace => "preorder_trace",
            Task::InorderTrace => "inorder_trace",
        }
    }

    pub fn is_tree(self) -> bool {
        matches!(
            self,
            Task::Preorder | Task::Inorder | Task::PreorderTrace | Task::InorderTrace
        )
    }

    fn func(self) -> &'static str {
        match self {
            Task::Preorder | Task::PreorderTrace => builtin::PREORDER,
            Task::Inorder | Task::InorderTrace => builtin::INORDER,
            _ => builtin::SUCC,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| DatasetError::Task(s.to_owned()))
    }
}

/// Everything that determines a generated dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub task: Task,
    pub order: Order,
    /// Successor tasks: the training values.
    pub values: Option<RangeInclusive<u64>>,
    /// Successor: bit lengths of the random test set.
    pub random_bits: Option<RangeInclusive<u32>>,
    pub random_count: usize,
    /// Successor: bit lengths of the edge-case test set.
    pub edge_bits: Option<RangeInclusive<u32>>,
    pub depths: RangeInclusive<usize>,
    pub alphabet: String,
    pub train_count: usize,
    pub test_count: usize,
    /// Traversals: reduction levels to apply; `None` is full evaluation.
    pub k: Option<usize>,
    /// `from=to,...` token renaming.
    pub remap: Option<String>,
    pub pad_max: usize,
    pub pad_token: String,
    pub k1: usize,
    pub k2: usize,
    /// Record `k1`/`k2` as weights instead of repeating records.
    pub upweight: bool,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(task: Task) -> Self {
        let tree = TreeSpec::default();
        DatasetSpec {
            task,
            order: if task.is_tree() {
                Order::TreeAppendix
            } else {
                Order::ConstructorReverse
            },
            values: None,
            random_bits: None,
            random_count: 1000,
            edge_bits: None,
            depths: tree.depths,
            alphabet: DEFAULT_ALPHABET.to_owned(),
            train_count: tree.train_count,
            test_count: tree.test_count,
            k: None,
            remap: None,
            pad_max: 0,
            pad_token: PAD.to_owned(),
            k1: 1,
            k2: 1,
            upweight: false,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub name: String,
    pub records: Vec<ExampleRecord>,
}

fn successor_splits(spec: &DatasetSpec) -> Result<Vec<Split>, DatasetError> {
    let mut splits = Vec::new();
    let train = spec.values.clone();
    if let Some(values) = &train {
        let records = match spec.task {
            Task::Successor => gen_successor_range(values.clone(), spec.order)?,
            Task::SuccessorStep => gen_single_step(values.clone())?,
            _ => gen_successor_traces(values.clone())?,
        };
        splits.push(Split {
            name: "train".into(),
            records,
        });
    }
    if spec.task == Task::Successor {
        if let Some(bits) = &spec.random_bits {
            let records =
                gen_successor_random_excluding(bits.clone(), spec.random_count, spec.seed, spec.order, train.clone())?;
            splits.push(Split {
                name: "random".into(),
                records,
            });
        }
        if let Some(bits) = &spec.edge_bits {
            let mut records = gen_successor_edges(bits.clone(), spec.order)?;
            if let Some(t) = &train {
                records.retain(|r| !t.contains(&r.meta.value.expect("numeric record")));
            }
            splits.push(Split {
                name: "edge".into(),
                records,
            });
        }
    } else if spec.random_bits.is_some() || spec.edge_bits.is_some() {
        return Err(DatasetError::Range(format!("{} takes only a value range", spec.task)));
    }
    if splits.is_empty() {
        return Err(DatasetError::Range(
            "successor tasks need a value range, random bits or edge bits".into(),
        ));
    }
    if spec.task != Task::Successor && spec.order != Order::ConstructorReverse {
        return Err(DatasetError::Order(spec.order));
    }
    Ok(splits)
}

fn tree_splits(spec: &DatasetSpec) -> Result<Vec<Split>, DatasetError> {
    let split = gen_trees(&TreeSpec {
        depths: spec.depths.clone(),
        alphabet: spec.alphabet.chars().collect(),
        train_count: spec.train_count,
        test_count: spec.test_count,
        seed: spec.seed,
    })?;
    let func = spec.task.func();
    let make = |trees: &[_], name: &str| -> Result<Split, DatasetError> {
        let records = match spec.task {
            Task::Preorder | Task::Inorder => gen_traversal(trees, func, spec.k, name)?,
            _ => gen_traversal_traces(trees, func, name)?,
        };
        Ok(Split {
            name: name.into(),
            records,
        })
    };
    Ok(vec![make(&split.train, "train")?, make(&split.test, "test")?])
}

/// Generate every split `spec` describes, then apply remapping and padding
/// to all splits and oversampling or up-weighting to the training split.
pub fn generate(spec: &DatasetSpec) -> Result<Vec<Split>, DatasetError> {
    if spec.k1 == 0 || spec.k2 == 0 {
        return Err(DatasetError::Range("oversampling factors must be at least 1".into()));
    }
    if spec.k.is_some() && !matches!(spec.task, Task::Preorder | Task::Inorder) {
        return Err(DatasetError::Range("k applies only to preorder and inorder".into()));
    }
    let mut splits = if spec.task.is_tree() {
        if spec.order != Order::TreeAppendix {
            return Err(DatasetError::Order(spec.order));
        }
        tree_splits(spec)?
    } else {
        successor_splits(spec)?
    };
    let sigma = spec.remap.as_deref().map(VocabRemap::parse).transpose()?;
    for s in &mut splits {
        if let Some(sigma) = &sigma {
            remap_records(&mut s.records, sigma)?;
        }
        apply_padding(&mut s.records, spec.pad_max, &spec.pad_token, spec.seed);
        if s.name == "train" {
            if spec.upweight {
                upweight(&mut s.records, spec.k1, spec.k2)?;
            } else if (spec.k1, spec.k2) != (1, 1) {
                s.records = oversample(&s.records, spec.k1, spec.k2, spec.seed)?;
            }
        }
    }
    Ok(splits)
}
