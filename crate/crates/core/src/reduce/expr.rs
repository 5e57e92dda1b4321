use std::fmt;
use std::sync::Arc;

use crate::term::{Term, Token};

/// A reduction state: constructor values extended with pending calls, list
/// literals and list concatenation. Constructor nodes share their payloads
/// and children, so cloning a value is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Ctor {
        ctor: Token,
        payloads: Arc<[Token]>,
        args: Arc<[Expr]>,
    },
    Call {
        func: String,
        args: Vec<Expr>,
    },
    List(Vec<Token>),
    Concat(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn value(t: &Term) -> Expr {
        Expr::Ctor {
            ctor: t.ctor.clone(),
            payloads: t.payloads.iter().cloned().collect(),
            args: t.children.iter().map(Expr::value).collect(),
        }
    }

    pub fn call(func: &str, args: Vec<Expr>) -> Expr {
        Expr::Call {
            func: func.to_owned(),
            args,
        }
    }

    /// `func t₁ … tₙ` over term arguments.
    pub fn apply(func: &str, args: &[Term]) -> Expr {
        Expr::call(func, args.iter().map(Expr::value).collect())
    }

    /// A constructor node with one child and no payloads.
    pub fn wrap(ctor: &Token, inner: Expr) -> Expr {
        Expr::Ctor {
            ctor: ctor.clone(),
            payloads: Arc::from([]),
            args: Arc::from([inner]),
        }
    }

    pub fn concat(a: Expr, b: Expr) -> Expr {
        Expr::Concat(Box::new(a), Box::new(b))
    }

    /// The term this expression denotes, if it is a pure constructor value.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            Expr::Ctor { ctor, payloads, args } => Some(Term {
                ctor: ctor.clone(),
                payloads: payloads.to_vec(),
                children: args.iter().map(Expr::to_term).collect::<Option<Vec<_>>>()?,
            }),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Token]> {
        match self {
            Expr::List(v) => Some(v),
            _ => None,
        }
    }

    /// No pending calls and no concatenations left.
    pub fn is_normal(&self) -> bool {
        match self {
            Expr::Call { .. } | Expr::Concat(..) => false,
            Expr::List(_) => true,
            Expr::Ctor { args, .. } => args.iter().all(Expr::is_normal),
        }
    }

    pub fn contains_call(&self) -> bool {
        match self {
            Expr::Call { .. } => true,
            Expr::List(_) => false,
            Expr::Ctor { args, .. } => args.iter().any(Expr::contains_call),
            Expr::Concat(a, b) => a.contains_call() || b.contains_call(),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Ctor { args, .. } => args.iter().collect(),
            Expr::Call { args, .. } => args.iter().collect(),
            Expr::List(_) => Vec::new(),
            Expr::Concat(a, b) => vec![a, b],
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Expr> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at(rest)),
        }
    }

    /// Token count of the state, used to size fuel budgets.
    pub fn size(&self) -> usize {
        match self {
            Expr::Ctor { payloads, args, .. } => 1 + payloads.len() + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Call { args, .. } => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::List(v) => v.len().max(1),
            Expr::Concat(a, b) => a.size() + b.size(),
        }
    }
}

fn needs_parens(e: &Expr) -> bool {
    match e {
        Expr::Ctor { payloads, args, .. } => !payloads.is_empty() || !args.is_empty(),
        Expr::Call { .. } | Expr::Concat(..) => true,
        Expr::List(_) => false,
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    if needs_parens(e) {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Coq-style rendering: `add (S I) I`, `Branch 'a' Leaf Leaf`, `['c'; 'a']`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ctor { ctor, payloads, args } => {
                write!(f, "{ctor}")?;
                for p in payloads.iter() {
                    write!(f, " '{p}'")?;
                }
                for a in args.iter() {
                    f.write_str(" ")?;
                    write_atom(f, a)?;
                }
                Ok(())
            }
            Expr::Call { func, args } => {
                f.write_str(func)?;
                for a in args {
                    f.write_str(" ")?;
                    write_atom(f, a)?;
                }
                Ok(())
            }
            Expr::List(v) => {
                f.write_str("[")?;
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "'{t}'")?;
                }
                f.write_str("]")
            }
            Expr::Concat(a, b) => {
                match **a {
                    Expr::Concat(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " ++ {b}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::peano;
    use crate::tree::cat_tree;

    #[test]
    fn displays_like_the_source_language() {
        let e = Expr::apply("add", &[peano(2).unwrap(), peano(1).unwrap()]);
        assert_eq!(e.to_string(), "add (S I) I");
        let t = Expr::value(&cat_tree());
        assert_eq!(
            t.to_string(),
            "Branch 'a' (Branch 'c' Leaf Leaf) (Branch 't' Leaf Leaf)"
        );
        let l = Expr::List(vec!["c".into(), "a".into(), "t".into()]);
        assert_eq!(l.to_string(), "['c'; 'a'; 't']");
    }

    #[test]
    fn value_round_trip() {
        let t = cat_tree();
        assert_eq!(Expr::value(&t).to_term(), Some(t));
        assert!(Expr::value(&cat_tree()).is_normal());
        assert!(!Expr::apply("s", &[Term::leaf("01")]).is_normal());
    }
}
