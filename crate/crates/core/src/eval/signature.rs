use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::Token;

/// How a wrong prediction differs from the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureSignature {
    OneTokenShort,
    OneTokenLong,
    WrongToken,
    Other,
}

impl FailureSignature {
    pub const ALL: [FailureSignature; 4] = [
        FailureSignature::OneTokenShort,
        FailureSignature::OneTokenLong,
        FailureSignature::WrongToken,
        FailureSignature::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FailureSignature::OneTokenShort => "one-token-short",
            FailureSignature::OneTokenLong => "one-token-long",
            FailureSignature::WrongToken => "wrong-token",
            FailureSignature::Other => "other",
        }
    }
}

impl fmt::Display for FailureSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("prediction equals the target; there is no failure to classify")]
pub struct NotAFailure;

/// Whether `short` is `long` with exactly one token removed.
fn one_deletion(long: &[Token], short: &[Token]) -> bool {
    if long.len() != short.len() + 1 {
        return false;
    }
    let i = long.iter().zip(short).take_while(|(a, b)| a == b).count();
    long[i + 1..] == short[i..]
}

pub fn failure_signature(pred: &[Token], gold: &[Token]) -> Result<FailureSignature, NotAFailure> {
    if pred == gold {
        Err(NotAFailure)
    } else if one_deletion(gold, pred) {
        Ok(FailureSignature::OneTokenShort)
    } else if one_deletion(pred, gold) {
        Ok(FailureSignature::OneTokenLong)
    } else if pred.len() == gold.len() {
        Ok(FailureSignature::WrongToken)
    } else {
        Ok(FailureSignature::Other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::tokens;

    fn sig(p: &str, g: &str) -> Result<FailureSignature, NotAFailure> {
        failure_signature(&tokens(p), &tokens(g))
    }

    #[test]
    fn classifies() {
        assert_eq!(sig("01 X0 X0", "01 X0 X0 X0"), Ok(FailureSignature::OneTokenShort));
        assert_eq!(sig("X0 X0 01", "X0 X0 X0 01"), Ok(FailureSignature::OneTokenShort));
        assert_eq!(sig("01 X0 X1 X0", "01 X0 X0"), Ok(FailureSignature::OneTokenLong));
        assert_eq!(sig("01 X1 X0", "01 X0 X0"), Ok(FailureSignature::WrongToken));
        assert_eq!(sig("01 X1 X1", "01 X0 X0"), Ok(FailureSignature::WrongToken));
        assert_eq!(sig("X1 01", "01 X0 X0"), Ok(FailureSignature::Other));
        assert_eq!(sig("X1 01", "X1 01"), Err(NotAFailure));
    }

    #[test]
    fn short_needs_a_single_deletion() {
        assert_eq!(sig("X1 X0", "X0 X1 X1"), Ok(FailureSignature::Other));
    }
}
