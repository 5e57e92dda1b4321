use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::term::Token;

/// A location: a name with an optional index, e.g. `pos` or `tape(3)`.
/// Serializes as its display form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub name: &'static str,
    pub index: Option<usize>,
}

impl Loc {
    pub const fn new(name: &'static str) -> Self {
        Loc { name, index: None }
    }

    pub const fn at(name: &'static str, index: usize) -> Self {
        Loc {
            name,
            index: Some(index),
        }
    }
}

impl Serialize for Loc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}({i})", self.name),
            None => f.write_str(self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(untagged)]
pub enum Value {
    Token(Token),
    Nat(usize),
    Bool(bool),
    #[default]
    Undef,
}

impl Value {
    pub fn tok(s: &str) -> Self {
        Value::Token(Token::from(s))
    }

    pub fn as_token(&self) -> Option<&Token> {
        match self {
            Value::Token(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<usize> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    /// `Undef` and `false` are both false.
    pub fn truthy(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn is_undef(&self) -> bool {
        matches!(self, Value::Undef)
    }

    pub fn is_token(&self, s: &str) -> bool {
        matches!(self, Value::Token(t) if t == s)
    }
}

impl From<Token> for Value {
    fn from(t: Token) -> Self {
        Value::Token(t)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Nat(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Token(t) => write!(f, "{t}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Undef => f.write_str("undef"),
        }
    }
}

/// A finite store. Unset locations read as `Undef`; writing `Undef` unsets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AsmState {
    store: BTreeMap<Loc, Value>,
}

impl AsmState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, loc: Loc) -> &Value {
        static UNDEF: Value = Value::Undef;
        self.store.get(&loc).unwrap_or(&UNDEF)
    }

    pub fn set(&mut self, loc: Loc, v: impl Into<Value>) {
        match v.into() {
            Value::Undef => {
                self.store.remove(&loc);
            }
            v => {
                self.store.insert(loc, v);
            }
        }
    }

    pub fn with(mut self, loc: Loc, v: impl Into<Value>) -> Self {
        self.set(loc, v);
        self
    }

    /// Write `tokens` into `name(0..)` and their count into `len`.
    pub fn load(&mut self, name: &'static str, len: Loc, tokens: &[Token]) {
        for (i, t) in tokens.iter().enumerate() {
            self.set(Loc::at(name, i), t.clone());
        }
        self.set(len, tokens.len());
    }

    /// Read `name(0..n)` where `n` is the natural stored at `len`.
    pub fn read_tokens(&self, name: &'static str, len: Loc) -> Vec<Token> {
        let n = self.get(len).as_nat().unwrap_or(0);
        (0..n)
            .filter_map(|i| self.get(Loc::at(name, i)).as_token().cloned())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Loc, &Value)> {
        self.store.iter()
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }
}

impl fmt::Display for AsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, v)) in self.store.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}: {v}")?;
        }
        f.write_str("}")
    }
}

/// Read access to a state that remembers which locations were read.
pub struct StateView<'a> {
    state: &'a AsmState,
    reads: RefCell<Vec<Loc>>,
}

impl<'a> StateView<'a> {
    pub fn new(state: &'a AsmState) -> Self {
        StateView {
            state,
            reads: RefCell::new(Vec::new()),
        }
    }

    pub fn get(&self, loc: Loc) -> &'a Value {
        self.reads.borrow_mut().push(loc);
        self.state.get(loc)
    }

    pub fn nat(&self, loc: Loc) -> usize {
        self.get(loc).as_nat().unwrap_or(0)
    }

    pub fn flag(&self, loc: Loc) -> bool {
        self.get(loc).truthy()
    }

    pub fn is_token(&self, loc: Loc, s: &str) -> bool {
        self.get(loc).is_token(s)
    }

    pub fn tokens(&self, name: &'static str, len: Loc) -> Vec<Token> {
        let n = self.nat(len);
        (0..n)
            .filter_map(|i| self.get(Loc::at(name, i)).as_token().cloned())
            .collect()
    }

    pub fn take_reads(&self) -> Vec<Loc> {
        std::mem::take(&mut self.reads.borrow_mut())
    }

    pub fn state(&self) -> &'a AsmState {
        self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unset_reads_undef() {
        let s = AsmState::new();
        assert_eq!(s.get(Loc::new("x")), &Value::Undef);
        let s = s.with(Loc::at("t", 2), Value::tok("X0"));
        assert_eq!(s.to_string(), "{t(2): X0}");
        let mut s = s;
        s.set(Loc::at("t", 2), Value::Undef);
        assert!(s.is_empty());
    }

    #[test]
    fn view_records_reads() {
        let s = AsmState::new().with(Loc::new("pos"), 3usize);
        let v = StateView::new(&s);
        assert_eq!(v.nat(Loc::new("pos")), 3);
        assert!(!v.flag(Loc::new("done")));
        assert_eq!(v.take_reads(), vec![Loc::new("pos"), Loc::new("done")]);
        assert!(v.take_reads().is_empty());
    }
}
