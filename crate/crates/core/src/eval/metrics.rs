use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use super::signature::{failure_signature, FailureSignature};
use super::EvalError;
use crate::dataset::ExampleRecord;
use crate::term::{tokens, Token};

/// A candidate output, either a token list or a whitespace separated string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Candidate(pub Vec<Token>);

impl<'de> Deserialize<'de> for Candidate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tokens(Vec<String>),
            Text(String),
        }
        let text = match Repr::deserialize(d)? {
            Repr::Tokens(v) => v.join(" "),
            Repr::Text(s) => s,
        };
        Ok(Candidate(tokens(&text)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    /// In sampling order.
    pub candidates: Vec<Candidate>,
}

impl PredictionRecord {
    pub fn new(id: &str, candidates: Vec<Vec<Token>>) -> Self {
        PredictionRecord {
            id: id.to_owned(),
            candidates: candidates.into_iter().map(Candidate).collect(),
        }
    }
}

/// Gold records paired with their predictions, in gold order.
fn pair<'a>(
    preds: &'a [PredictionRecord],
    gold: &'a [ExampleRecord],
) -> Result<Vec<(&'a ExampleRecord, &'a PredictionRecord)>, EvalError> {
    let mut by_id: HashMap<&str, &PredictionRecord> = HashMap::with_capacity(preds.len());
    for p in preds {
        if p.candidates.is_empty() {
            return Err(EvalError::NoCandidates(p.id.clone()));
        }
        if by_id.insert(&p.id, p).is_some() {
            return Err(EvalError::DuplicatePrediction(p.id.clone()));
        }
    }
    let mut seen = HashMap::with_capacity(gold.len());
    let mut out = Vec::with_capacity(gold.len());
    for g in gold {
        if seen.insert(g.id.as_str(), ()).is_some() {
            return Err(EvalError::DuplicateGold(g.id.clone()));
        }
        let p = by_id
            .get(g.id.as_str())
            .ok_or_else(|| EvalError::MissingPrediction(g.id.clone()))?;
        out.push((g, *p));
    }
    if let Some(extra) = preds.iter().find(|p| !seen.contains_key(p.id.as_str())) {
        return Err(EvalError::UnknownId(extra.id.clone()));
    }
    Ok(out)
}

fn hit(g: &ExampleRecord, p: &PredictionRecord, k: usize) -> bool {
    p.candidates.iter().take(k).any(|c| c.0 == g.target)
}

fn fraction(hits: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        hits as f64 / n as f64
    }
}

/// Fraction of gold records whose first candidate equals the target.
pub fn exact_match(preds: &[PredictionRecord], gold: &[ExampleRecord]) -> Result<f64, EvalError> {
    hit_at_k(preds, gold, 1)
}

/// Fraction of gold records with the target among the first `k` candidates.
pub fn hit_at_k(preds: &[PredictionRecord], gold: &[ExampleRecord], k: usize) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    let pairs = pair(preds, gold)?;
    Ok(fraction(
        pairs.iter().filter(|(g, p)| hit(g, p, k)).count(),
        pairs.len(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownKey {
    Bits,
    Depth,
    EdgeGroup,
    TreeDepth,
}

impl BreakdownKey {
    pub const ALL: [BreakdownKey; 4] = [
        BreakdownKey::Bits,
        BreakdownKey::Depth,
        BreakdownKey::EdgeGroup,
        BreakdownKey::TreeDepth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BreakdownKey::Bits => "bits",
            BreakdownKey::Depth => "depth",
            BreakdownKey::EdgeGroup => "edge_group",
            BreakdownKey::TreeDepth => "tree_depth",
        }
    }

    fn of(self, r: &ExampleRecord) -> Option<u64> {
        match self {
            BreakdownKey::Bits => r.meta.bits.map(u64::from),
            BreakdownKey::Depth => r.meta.depth.map(|d| d as u64),
            BreakdownKey::EdgeGroup => Some(u64::from(r.meta.edge_group)),
            BreakdownKey::TreeDepth => r.meta.tree_depth.map(|d| d as u64),
        }
    }
}

impl FromStr for BreakdownKey {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bits" | "bit_length" => Ok(BreakdownKey::Bits),
            "depth" => Ok(BreakdownKey::Depth),
            "edge_group" | "edge" => Ok(BreakdownKey::EdgeGroup),
            "tree_depth" => Ok(BreakdownKey::TreeDepth),
            other => Err(EvalError::UnknownKey(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub bucket: u64,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub hit_at: BTreeMap<usize, f64>,
}

fn buckets(pairs: &[(&ExampleRecord, &PredictionRecord)], key: BreakdownKey, ks: &[usize]) -> Vec<BucketRow> {
    let mut groups: BTreeMap<u64, Vec<(&ExampleRecord, &PredictionRecord)>> = BTreeMap::new();
    for &(g, p) in pairs {
        if let Some(b) = key.of(g) {
            groups.entry(b).or_default().push((g, p));
        }
    }
    groups
        .into_iter()
        .map(|(bucket, rows)| {
            let n = rows.len();
            let hits = |k| rows.iter().filter(|(g, p)| hit(g, p, k)).count();
            let correct = hits(1);
            BucketRow {
                bucket,
                n,
                correct,
                accuracy: fraction(correct, n),
                hit_at: ks.iter().map(|&k| (k, fraction(hits(k), n))).collect(),
            }
        })
        .collect()
}

/// Exact-match accuracy per value of `key`. Records without that metadata
/// are left out; buckets with no records do not appear.
pub fn breakdown(
    preds: &[PredictionRecord],
    gold: &[ExampleRecord],
    key: BreakdownKey,
) -> Result<Vec<BucketRow>, EvalError> {
    Ok(buckets(&pair(preds, gold)?, key, &DEFAULT_KS))
}

pub const DEFAULT_KS: [usize; 3] = [1, 3, 5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub accuracy: f64,
    /// `k` to Hit@k.
    pub hit_at: BTreeMap<usize, f64>,
    pub breakdowns: BTreeMap<String, Vec<BucketRow>>,
    /// First-candidate failures by signature.
    pub failures: BTreeMap<String, usize>,
}

impl MetricsReport {
    pub fn build(preds: &[PredictionRecord], gold: &[ExampleRecord], ks: &[usize]) -> Result<Self, EvalError> {
        if ks.contains(&0) {
            return Err(EvalError::ZeroK);
        }
        let pairs = pair(preds, gold)?;
        let n = pairs.len();
        let hits = |k| fraction(pairs.iter().filter(|(g, p)| hit(g, p, k)).count(), n);
        let mut failures: BTreeMap<String, usize> = FailureSignature::ALL
            .iter()
            .map(|s| (s.label().to_owned(), 0))
            .collect();
        for (g, p) in &pairs {
            if let Ok(sig) = failure_signature(&p.candidates[0].0, &g.target) {
                *failures.get_mut(sig.label()).expect("all labels present") += 1;
            }
        }
        let breakdowns = BreakdownKey::ALL
            .iter()
            .map(|&key| (key.name().to_owned(), buckets(&pairs, key, ks)))
            .filter(|(_, rows)| !rows.is_empty())
            .collect();
        Ok(MetricsReport {
            n,
            accuracy: hits(1),
            hit_at: ks.iter().map(|&k| (k, hits(k))).collect(),
            breakdowns,
            failures,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" | "structured" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub fn render_report(r: &MetricsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "N={}", r.n);
            let _ = writeln!(s, "accuracy {:.4}", r.accuracy);
            for (k, v) in &r.hit_at {
                let _ = writeln!(s, "hit@{k} {v:.4}");
            }
            for (key, rows) in &r.breakdowns {
                let _ = write!(s, "\n{key:>10}  {:>6}  {:>7}", "n", "correct");
                for k in r.hit_at.keys() {
                    let _ = write!(s, "  {:>7}", format!("hit@{k}"));
                }
                s.push('\n');
                for row in rows {
                    let _ = write!(s, "{:>10}  {:>6}  {:>7}", row.bucket, row.n, row.correct);
                    for v in row.hit_at.values() {
                        let _ = write!(s, "  {v:>7.4}");
                    }
                    s.push('\n');
                }
            }
            let _ = writeln!(s, "\nfailures");
            for (label, n) in &r.failures {
                let _ = writeln!(s, "  {label:<16} {n}");
            }
            s
        }
    }
}
