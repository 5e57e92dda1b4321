//! Vocabulary remapping: a bijective renaming of tokens.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::term::{Token, TokenSeq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RemapError {
    #[error("`{0}` is outside the remap domain")]
    OutsideDomain(Token),
    #[error("`{0}` is the image of two different tokens")]
    NotInjective(Token),
    #[error("bad mapping entry `{0}` (expected from=to)")]
    BadEntry(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VocabRemap {
    mapping: BTreeMap<Token, Token>,
}

impl VocabRemap {
    pub fn new(pairs: impl IntoIterator<Item = (Token, Token)>) -> Result<Self, RemapError> {
        let mut mapping = BTreeMap::new();
        for (from, to) in pairs {
            mapping.insert(from, to);
        }
        let mut images = std::collections::BTreeSet::new();
        for to in mapping.values() {
            if !images.insert(to.clone()) {
                return Err(RemapError::NotInjective(to.clone()));
            }
        }
        Ok(VocabRemap { mapping })
    }

    pub fn identity(vocab: &[Token]) -> Self {
        VocabRemap {
            mapping: vocab.iter().map(|t| (t.clone(), t.clone())).collect(),
        }
    }

    /// Parse `X0=a,X1=b,01=c`.
    pub fn parse(spec: &str) -> Result<Self, RemapError> {
        let mut pairs = Vec::new();
        for entry in spec.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (from, to) = entry
                .split_once('=')
                .ok_or_else(|| RemapError::BadEntry(entry.to_owned()))?;
            let (from, to) = (from.trim(), to.trim());
            if from.is_empty() || to.is_empty() || to.contains(char::is_whitespace) {
                return Err(RemapError::BadEntry(entry.to_owned()));
            }
            pairs.push((Token::from(from), Token::from(to)));
        }
        VocabRemap::new(pairs)
    }

    /// Extend with identity entries for `tokens` not already in the domain.
    /// Fails if one of them is already used as an image.
    pub fn with_fixed(mut self, tokens: &[Token]) -> Result<Self, RemapError> {
        for t in tokens {
            if !self.mapping.contains_key(t) {
                if self.mapping.values().any(|v| v == t) {
                    return Err(RemapError::NotInjective(t.clone()));
                }
                self.mapping.insert(t.clone(), t.clone());
            }
        }
        Ok(self)
    }

    pub fn get(&self, t: &Token) -> Option<&Token> {
        self.mapping.get(t)
    }

    pub fn inverse(&self) -> Self {
        VocabRemap {
            mapping: self.mapping.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Token, &Token)> {
        self.mapping.iter()
    }

    pub fn apply(&self, tokens: &[Token]) -> Result<Vec<Token>, RemapError> {
        tokens
            .iter()
            .map(|t| {
                self.mapping
                    .get(t)
                    .cloned()
                    .ok_or_else(|| RemapError::OutsideDomain(t.clone()))
            })
            .collect()
    }
}

/// Positionwise substitution of every token through `sigma`.
pub fn remap_tokens(seq: &TokenSeq, sigma: &VocabRemap) -> Result<TokenSeq, RemapError> {
    Ok(TokenSeq::new(sigma.apply(&seq.tokens)?, seq.order))
}
