//! Scoring of predictions and reduction traces against the oracles.

mod metrics;
mod signature;
mod trace;

use thiserror::Error;

pub use metrics::{
    breakdown, exact_match, hit_at_k, render_report, BreakdownKey, BucketRow, Candidate, MetricsReport,
    PredictionRecord, ReportFormat, DEFAULT_KS,
};
pub use signature::{failure_signature, FailureSignature, NotAFailure};
pub use trace::{validate_trace, TraceErrorLabel, TraceJudgment, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no prediction for gold id `{0}`")]
    MissingPrediction(String),
    #[error("prediction id `{0}` appears more than once")]
    DuplicatePrediction(String),
    #[error("gold id `{0}` appears more than once")]
    DuplicateGold(String),
    #[error("prediction id `{0}` is not in the gold set")]
    UnknownId(String),
    #[error("prediction `{0}` has no candidates")]
    NoCandidates(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("unknown breakdown key `{0}` (expected bits, depth, edge_group or tree_depth)")]
    UnknownKey(String),
    #[error("no trace format for task `{0}`")]
    UnknownTask(String),
}
