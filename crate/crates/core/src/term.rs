//! Inductive datatypes, their terms, and constructor-order linearization.
//!
//! A datatype is described by its constructors. Each constructor has a number
//! of recursive child slots and a list of non-recursive payload slots. A term
//! is a constructor node with its payloads and children, and linearizes to a
//! flat preorder token list (outermost constructor first).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An atomic symbol. Tokens are never split into characters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(Arc<str>);

impl Token {
    pub fn new(s: impl Into<String>) -> Self {
        Token(Arc::from(s.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(Token::from)
    }
}

impl From<&str> for Token {
    fn from(s: &str) -> Self {
        Token(Arc::from(s))
    }
}

impl From<String> for Token {
    fn from(s: String) -> Self {
        Token(Arc::from(s))
    }
}

impl From<char> for Token {
    fn from(c: char) -> Self {
        Token::from(c.to_string())
    }
}

impl PartialEq<str> for Token {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

/// Split canonical text (tokens separated by whitespace) into tokens.
pub fn tokens(text: &str) -> Vec<Token> {
    text.split_whitespace().map(Token::from).collect()
}

/// Join tokens with single spaces.
pub fn join(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_str());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    /// A single character drawn from a configurable alphabet.
    Char,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDef {
    pub name: Token,
    pub recursive_arity: usize,
    pub payload_kinds: Vec<PayloadKind>,
}

impl ConstructorDef {
    pub fn new(name: &str, recursive_arity: usize, payload_kinds: Vec<PayloadKind>) -> Self {
        ConstructorDef {
            name: Token::from(name),
            recursive_arity,
            payload_kinds,
        }
    }

    pub fn is_base(&self) -> bool {
        self.recursive_arity == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveDef {
    pub name: String,
    pub constructors: Vec<ConstructorDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefError {
    #[error("datatype `{0}` has no base constructor")]
    NoBaseCase(String),
    #[error("constructor `{ctor}` is declared twice in `{def}`")]
    DuplicateConstructor { def: String, ctor: Token },
}

impl InductiveDef {
    pub fn new(name: &str, constructors: Vec<ConstructorDef>) -> Result<Self, DefError> {
        if !constructors.iter().any(ConstructorDef::is_base) {
            return Err(DefError::NoBaseCase(name.to_owned()));
        }
        for (i, c) in constructors.iter().enumerate() {
            if constructors[..i].iter().any(|d| d.name == c.name) {
                return Err(DefError::DuplicateConstructor {
                    def: name.to_owned(),
                    ctor: c.name.clone(),
                });
            }
        }
        Ok(InductiveDef {
            name: name.to_owned(),
            constructors,
        })
    }

    pub fn constructor(&self, name: &str) -> Option<&ConstructorDef> {
        self.constructors.iter().find(|c| c.name == name)
    }

    pub fn base_constructors(&self) -> impl Iterator<Item = &ConstructorDef> {
        self.constructors.iter().filter(|c| c.is_base())
    }

    /// Constructor tokens, in declaration order.
    pub fn vocabulary(&self) -> Vec<Token> {
        self.constructors.iter().map(|c| c.name.clone()).collect()
    }
}

pub mod names {
    pub const PEANO: &str = "peano";
    pub const BIN_POS: &str = "bin_pos";
    pub const CHAR_TREE: &str = "char_tree";

    pub const ONE: &str = "I";
    pub const SUCC: &str = "S";

    pub const B01: &str = "01";
    pub const X0: &str = "X0";
    pub const X1: &str = "X1";

    pub const LEAF: &str = "Leaf";
    pub const BRANCH: &str = "Branch";
}

pub fn peano_def() -> InductiveDef {
    InductiveDef::new(
        names::PEANO,
        vec![
            ConstructorDef::new(names::ONE, 0, vec![]),
            ConstructorDef::new(names::SUCC, 1, vec![]),
        ],
    )
    .expect("peano is well formed")
}

pub fn bin_pos_def() -> InductiveDef {
    InductiveDef::new(
        names::BIN_POS,
        vec![
            ConstructorDef::new(names::B01, 0, vec![]),
            ConstructorDef::new(names::X0, 1, vec![]),
            ConstructorDef::new(names::X1, 1, vec![]),
        ],
    )
    .expect("bin_pos is well formed")
}

pub fn char_tree_def() -> InductiveDef {
    InductiveDef::new(
        names::CHAR_TREE,
        vec![
            ConstructorDef::new(names::LEAF, 0, vec![]),
            ConstructorDef::new(names::BRANCH, 2, vec![PayloadKind::Char]),
        ],
    )
    .expect("char_tree is well formed")
}

/// The three builtin datatypes: `peano`, `bin_pos` and `char_tree`.
pub fn builtin_defs() -> Vec<InductiveDef> {
    vec![peano_def(), bin_pos_def(), char_tree_def()]
}

/// A value of an inductive type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub ctor: Token,
    pub payloads: Vec<Token>,
    pub children: Vec<Term>,
}

impl Term {
    pub fn leaf(ctor: &str) -> Self {
        Term {
            ctor: Token::from(ctor),
            payloads: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn node(ctor: &str, payloads: Vec<Token>, children: Vec<Term>) -> Self {
        Term {
            ctor: Token::from(ctor),
            payloads,
            children,
        }
    }

    /// Apply a unary constructor on top of `self`.
    pub fn wrap(self, ctor: &str) -> Self {
        Term::node(ctor, Vec::new(), vec![self])
    }

    pub fn is(&self, ctor: &str) -> bool {
        self.ctor == ctor
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    /// Check arity and payload shapes against `def`.
    pub fn check(&self, def: &InductiveDef) -> Result<(), TermError> {
        let c = def
            .constructor(self.ctor.as_str())
            .ok_or_else(|| TermError::UnknownToken(self.ctor.clone()))?;
        if c.recursive_arity != self.children.len() || c.payload_kinds.len() != self.payloads.len() {
            return Err(TermError::ArityMismatch(self.ctor.clone()));
        }
        for p in &self.payloads {
            if p.as_str().chars().count() != 1 {
                return Err(TermError::BadPayload(p.clone()));
            }
        }
        self.children.iter().try_for_each(|ch| ch.check(def))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown token `{0}`")]
    UnknownToken(Token),
    #[error("constructor `{0}` applied to the wrong number of arguments")]
    ArityMismatch(Token),
    #[error("payload `{0}` is not a single character")]
    BadPayload(Token),
    #[error("sequence ended while constructor `{0}` still expected arguments")]
    Dangling(Token),
    #[error("empty token sequence")]
    Empty,
    #[error("{0} trailing token(s) after a complete term")]
    Trailing(usize),
    #[error("order `{0:?}` does not apply here")]
    OrderMismatch(Order),
    #[error("zero is not a positive binary number")]
    Zero,
}

/// Which surface order a token sequence is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// Outermost constructor first. For `bin_pos` this is the reverse
    /// (least significant bit first) order.
    #[serde(rename = "reverse", alias = "constructor_reverse")]
    ConstructorReverse,
    /// Exact reversal of the constructor order; `01` comes first.
    Natural,
    /// Parenthesized tree form: `value branch branch`.
    #[serde(rename = "tree")]
    TreeAppendix,
}

impl std::str::FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reverse" | "constructor" | "constructor_reverse" => Ok(Order::ConstructorReverse),
            "natural" => Ok(Order::Natural),
            "tree" => Ok(Order::TreeAppendix),
            other => Err(format!("unknown order `{other}` (expected reverse, natural or tree)")),
        }
    }
}

impl Order {
    pub fn name(self) -> &'static str {
        match self {
            Order::ConstructorReverse => "reverse",
            Order::Natural => "natural",
            Order::TreeAppendix => "tree",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSeq {
    pub tokens: Vec<Token>,
    pub order: Order,
}

impl TokenSeq {
    pub fn new(tokens: Vec<Token>, order: Order) -> Self {
        TokenSeq { tokens, order }
    }

    pub fn parse(text: &str, order: Order) -> Self {
        TokenSeq::new(tokens(text), order)
    }

    pub fn text(&self) -> String {
        join(&self.tokens)
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Flat preorder of constructor tokens; payload tokens follow their constructor.
pub fn linearize(term: &Term) -> TokenSeq {
    fn go(t: &Term, out: &mut Vec<Token>) {
        out.push(t.ctor.clone());
        out.extend(t.payloads.iter().cloned());
        for c in &t.children {
            go(c, out);
        }
    }
    let mut out = Vec::with_capacity(term.size());
    go(term, &mut out);
    TokenSeq::new(out, Order::ConstructorReverse)
}

/// Inverse of [`linearize`].
pub fn delinearize(seq: &TokenSeq, def: &InductiveDef) -> Result<Term, TermError> {
    if seq.order != Order::ConstructorReverse {
        return Err(TermError::OrderMismatch(seq.order));
    }
    let mut it = seq.tokens.iter().peekable();
    if it.peek().is_none() {
        return Err(TermError::Empty);
    }
    let term = parse_prefix(&mut it, def, None)?;
    let rest = it.count();
    if rest > 0 {
        return Err(TermError::Trailing(rest));
    }
    Ok(term)
}

fn parse_prefix<'a, I: Iterator<Item = &'a Token>>(
    it: &mut I,
    def: &InductiveDef,
    parent: Option<&Token>,
) -> Result<Term, TermError> {
    let tok = match it.next() {
        Some(t) => t,
        None => return Err(TermError::Dangling(parent.cloned().unwrap_or_else(|| Token::from("")))),
    };
    let tok = canonical_alias(tok);
    let c = def
        .constructor(tok.as_str())
        .ok_or_else(|| TermError::UnknownToken(tok.clone()))?;
    let mut payloads = Vec::with_capacity(c.payload_kinds.len());
    for _ in &c.payload_kinds {
        let p = it.next().ok_or_else(|| TermError::Dangling(c.name.clone()))?;
        if p.as_str().chars().count() != 1 {
            return Err(TermError::BadPayload(p.clone()));
        }
        payloads.push(p.clone());
    }
    let mut children = Vec::with_capacity(c.recursive_arity);
    for _ in 0..c.recursive_arity {
        children.push(parse_prefix(it, def, Some(&c.name))?);
    }
    Ok(Term {
        ctor: c.name.clone(),
        payloads,
        children,
    })
}

/// `XO` (letter O) is accepted as a spelling of `X0`.
pub fn canonical_alias(tok: &Token) -> Token {
    if tok == "XO" {
        Token::from(names::X0)
    } else {
        tok.clone()
    }
}

/// Convert between constructor (reverse) order and natural order.
///
/// Natural order is the exact reversal of the constructor token list, so the
/// conversion is an involution. Tree sequences have no natural order.
pub fn reorder(seq: &TokenSeq, target: Order) -> Result<TokenSeq, TermError> {
    match (seq.order, target) {
        (Order::TreeAppendix, _) => Err(TermError::OrderMismatch(Order::TreeAppendix)),
        (_, Order::TreeAppendix) => Err(TermError::OrderMismatch(Order::TreeAppendix)),
        (a, b) if a == b => Ok(seq.clone()),
        _ => {
            let mut tokens = seq.tokens.clone();
            tokens.reverse();
            Ok(TokenSeq::new(tokens, target))
        }
    }
}
