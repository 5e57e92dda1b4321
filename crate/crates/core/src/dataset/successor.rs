use std::ops::RangeInclusive;

use rand::Rng;

use super::{record_rng, DatasetError, ExampleRecord, Meta};
use crate::binary::{bin_encode, bin_tokens, bit_length, trailing_ones_below_msb};
use crate::reduce::render::{render_trace_tokens, TraceStyle};
use crate::reduce::{builtin, builtin_programs, Expr};
use crate::shortcut::{edge_group, edge_inputs};
use crate::term::{Order, Token};

pub const MAX_RANGE_VALUE: u64 = 1 << 31;
pub const MAX_RANDOM_BITS: u32 = 63;

fn binary_order(order: Order) -> Result<Order, DatasetError> {
    match order {
        Order::TreeAppendix => Err(DatasetError::Order(order)),
        o => Ok(o),
    }
}

fn numeric_meta(n: u64) -> Meta {
    Meta {
        value: Some(n),
        bits: Some(bit_length(n)),
        depth: Some(trailing_ones_below_msb(n) as usize + 1),
        edge_group: edge_group(n),
        ..Meta::default()
    }
}

fn successor_record(id: String, n: u64, order: Order) -> ExampleRecord {
    ExampleRecord {
        id,
        task: "successor".into(),
        order,
        input: bin_tokens(n, order).expect("positive"),
        target: bin_tokens(n + 1, order).expect("positive"),
        meta: numeric_meta(n),
    }
}

/// One record per value: `n` paired with `n + 1`.
pub fn gen_successor_range(values: RangeInclusive<u64>, order: Order) -> Result<Vec<ExampleRecord>, DatasetError> {
    let order = binary_order(order)?;
    if values.is_empty() || *values.start() < 1 || *values.end() >= MAX_RANGE_VALUE {
        return Err(DatasetError::Range(format!(
            "value range {}..={} must be non-empty and within 1..{MAX_RANGE_VALUE}",
            values.start(),
            values.end()
        )));
    }
    Ok(values
        .map(|n| successor_record(format!("successor-{}-{n}", order.name()), n, order))
        .collect())
}

/// `count` values: a bit length uniform over `bits`, then a value uniform
/// among those of that length.
pub fn gen_successor_random(
    bits: RangeInclusive<u32>,
    count: usize,
    seed: u64,
    order: Order,
) -> Result<Vec<ExampleRecord>, DatasetError> {
    gen_successor_random_excluding(bits, count, seed, order, None)
}

/// [`gen_successor_random`], redrawing any value that falls in `exclude`.
pub fn gen_successor_random_excluding(
    bits: RangeInclusive<u32>,
    count: usize,
    seed: u64,
    order: Order,
    exclude: Option<RangeInclusive<u64>>,
) -> Result<Vec<ExampleRecord>, DatasetError> {
    let order = binary_order(order)?;
    if bits.is_empty() || *bits.start() < 1 || *bits.end() > MAX_RANDOM_BITS {
        return Err(DatasetError::Range(format!(
            "bit range {}..={} must be non-empty and within 1..={MAX_RANDOM_BITS}",
            bits.start(),
            bits.end()
        )));
    }
    if count == 0 {
        return Err(DatasetError::Range("count must be at least 1".into()));
    }
    let lengths: Vec<u32> = match &exclude {
        None => bits.collect(),
        Some(ex) => bits
            .filter(|&l| !(ex.contains(&(1u64 << (l - 1))) && ex.contains(&((1u64 << l) - 1))))
            .collect(),
    };
    if lengths.is_empty() {
        return Err(DatasetError::Range("every value of the bit range is excluded".into()));
    }
    Ok((0..count)
        .map(|i| {
            let mut rng = record_rng(seed, i as u64);
            let n = loop {
                let l = lengths[rng.gen_range(0..lengths.len())];
                let n = rng.gen_range((1u64 << (l - 1))..=(1u64 << l) - 1);
                if !exclude.as_ref().is_some_and(|ex| ex.contains(&n)) {
                    break n;
                }
            };
            successor_record(format!("random-{}-{i:06}", order.name()), n, order)
        })
        .collect())
}

/// The two edge groups over `bits`, tagged with their group in `meta`.
pub fn gen_successor_edges(bits: RangeInclusive<u32>, order: Order) -> Result<Vec<ExampleRecord>, DatasetError> {
    let order = binary_order(order)?;
    if *bits.end() > MAX_RANDOM_BITS {
        return Err(DatasetError::Range(format!("bit lengths above {MAX_RANDOM_BITS}")));
    }
    let groups = edge_inputs(bits).map_err(|e| DatasetError::Range(e.to_string()))?;
    Ok(groups
        .iter()
        .flat_map(|g| {
            g.members
                .iter()
                .map(move |m| successor_record(format!("edge{}-{}-{}", g.id, order.name(), m.bits), m.value, order))
        })
        .collect())
}

fn successor_trace(n: u64) -> Vec<Vec<Token>> {
    let e = Expr::apply(builtin::SUCC, &[bin_encode(n).expect("positive")]);
    let trace = builtin_programs().normalize(&e).expect("successor terminates");
    let toks = render_trace_tokens(&trace, TraceStyle::Paren).expect("successor states render");
    toks.split(|t| t == "=").map(<[Token]>::to_vec).collect()
}

/// Each consecutive pair of states in the successor traces of `values`.
/// States are in the paren surface form, which is written in constructor
/// order.
pub fn gen_single_step(values: RangeInclusive<u64>) -> Result<Vec<ExampleRecord>, DatasetError> {
    if values.is_empty() || *values.start() < 1 || *values.end() >= MAX_RANGE_VALUE {
        return Err(DatasetError::Range(
            "value range must be non-empty and within 1..2^31".into(),
        ));
    }
    let mut out = Vec::new();
    for n in values {
        let states = successor_trace(n);
        for (i, w) in states.windows(2).enumerate() {
            out.push(ExampleRecord {
                id: format!("successor_step-{n}-{i}"),
                task: "successor_step".into(),
                order: Order::ConstructorReverse,
                input: w[0].clone(),
                target: w[1].clone(),
                meta: numeric_meta(n),
            });
        }
    }
    Ok(out)
}

/// Full paren-style traces of `s n`, one per value.
pub fn gen_successor_traces(values: RangeInclusive<u64>) -> Result<Vec<ExampleRecord>, DatasetError> {
    if values.is_empty() || *values.start() < 1 || *values.end() >= MAX_RANGE_VALUE {
        return Err(DatasetError::Range(
            "value range must be non-empty and within 1..2^31".into(),
        ));
    }
    Ok(values
        .map(|n| {
            let states = successor_trace(n);
            let sep = Token::from("=");
            ExampleRecord {
                id: format!("successor_trace-{n}"),
                task: "successor_trace".into(),
                order: Order::ConstructorReverse,
                input: bin_tokens(n, Order::ConstructorReverse).expect("positive"),
                target: states.join(&sep),
                meta: numeric_meta(n),
            }
        })
        .collect())
}
