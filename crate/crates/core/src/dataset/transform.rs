use rand::seq::SliceRandom;
use rand::Rng;

use super::{record_rng, DatasetError, ExampleRecord};
use crate::remap::VocabRemap;
use crate::term::Token;

pub const PAD: &str = "PAD";

const PAD_STREAM: u64 = 0x9ad0_9ad0;
const SHUFFLE_STREAM: u64 = 0x5a0f_f1e5;

/// Prefix input and target with the same `p ~ Uniform{0..=max}` pad tokens.
pub fn apply_padding(records: &mut [ExampleRecord], max: usize, pad: &str, seed: u64) {
    if max == 0 {
        return;
    }
    for (i, r) in records.iter_mut().enumerate() {
        let p = record_rng(seed ^ PAD_STREAM, i as u64).gen_range(0..=max);
        let prefix = std::iter::repeat_n(Token::from(pad), p);
        r.input = prefix.clone().chain(r.input.drain(..)).collect();
        r.target = prefix.chain(r.target.drain(..)).collect();
        r.meta.pad_len = p;
    }
}

/// Undo [`apply_padding`] using the recorded pad length.
pub fn strip_padding(r: &ExampleRecord) -> ExampleRecord {
    let mut out = r.clone();
    let p = r.meta.pad_len;
    out.input.drain(..p.min(out.input.len()));
    out.target.drain(..p.min(out.target.len()));
    out.meta.pad_len = 0;
    out
}

fn check_factors(k1: usize, k2: usize) -> Result<(), DatasetError> {
    if k1 == 0 || k2 == 0 {
        return Err(DatasetError::Range("oversampling factors must be at least 1".into()));
    }
    Ok(())
}

/// Repeat edge group 1 records `k1` times and group 2 records `k2` times,
/// then shuffle.
pub fn oversample(
    records: &[ExampleRecord],
    k1: usize,
    k2: usize,
    seed: u64,
) -> Result<Vec<ExampleRecord>, DatasetError> {
    check_factors(k1, k2)?;
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        let times = match r.meta.edge_group {
            1 => k1,
            2 => k2,
            _ => 1,
        };
        out.extend(std::iter::repeat_n(r, times).cloned());
    }
    out.shuffle(&mut record_rng(seed ^ SHUFFLE_STREAM, 0));
    Ok(out)
}

/// Set the per-record weight to the group's factor, for trainers that scale
/// the loss of edge cases instead of repeating them.
pub fn upweight(records: &mut [ExampleRecord], k1: usize, k2: usize) -> Result<(), DatasetError> {
    check_factors(k1, k2)?;
    for r in records {
        r.meta.weight = match r.meta.edge_group {
            1 => k1 as u32,
            2 => k2 as u32,
            _ => 1,
        };
    }
    Ok(())
}

/// Rename tokens in inputs and targets through `sigma`. Tokens outside the
/// domain (brackets, separators, padding) are kept as they are, unless one of
/// them is also an image of `sigma`.
pub fn remap_records(records: &mut [ExampleRecord], sigma: &VocabRemap) -> Result<(), DatasetError> {
    let mut others: Vec<Token> = records
        .iter()
        .flat_map(|r| r.input.iter().chain(&r.target))
        .filter(|t| sigma.get(t).is_none())
        .cloned()
        .collect();
    others.sort();
    others.dedup();
    let full = sigma.clone().with_fixed(&others)?;
    for r in records {
        r.input = full.apply(&r.input)?;
        r.target = full.apply(&r.target)?;
    }
    Ok(())
}
