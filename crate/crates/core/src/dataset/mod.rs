//! Deterministic dataset generation for the successor and traversal tasks.
//!
//! Every random choice draws from a generator seeded by hashing the global
//! seed with the record index, so output does not depend on generation order.

mod record;
mod spec;
mod successor;
mod transform;
mod trees;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::remap::RemapError;
use crate::term::Order;

pub use record::{parse_jsonl, read_jsonl, to_jsonl, write_jsonl, ExampleRecord, JsonlError, Meta};
pub use spec::{generate, DatasetSpec, Split, Task};
pub use successor::{
    gen_single_step, gen_successor_edges, gen_successor_random, gen_successor_random_excluding, gen_successor_range,
    gen_successor_traces, MAX_RANDOM_BITS, MAX_RANGE_VALUE,
};
pub use transform::{apply_padding, oversample, remap_records, strip_padding, upweight, PAD};
pub use trees::{
    continue_probability, gen_traversal, gen_traversal_traces, gen_trees, structure_key, TreeSpec, TreeSplit,
    DEFAULT_ALPHABET,
};

pub const DEFAULT_SEED: u64 = 20_231_017;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("order {0:?} does not apply to this task")]
    Order(Order),
    #[error("{0}")]
    Range(String),
    #[error("unknown task `{0}`")]
    Task(String),
    #[error("not enough distinct trees: {0}")]
    Exhausted(String),
    #[error(transparent)]
    Remap(#[from] RemapError),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The generator for record `index` under `seed`.
pub fn record_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

#[cfg(test)]
mod tests;
