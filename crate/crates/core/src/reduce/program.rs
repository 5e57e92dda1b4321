use std::collections::BTreeMap;

use thiserror::Error;

use super::expr::Expr;
use crate::term::{bin_pos_def, char_tree_def, names, peano_def, InductiveDef, Token};

/// A payload slot in a template: either bound by the pattern or a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PayloadRef {
    Var(String),
    Lit(Token),
}

/// Right-hand side of a clause, with variables bound by the pattern and by the
/// program's extra parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    Var(String),
    Ctor {
        ctor: Token,
        payloads: Vec<PayloadRef>,
        args: Vec<Template>,
    },
    Call {
        func: String,
        args: Vec<Template>,
    },
    List(Vec<PayloadRef>),
    Concat(Box<Template>, Box<Template>),
}

impl Template {
    pub fn var(name: &str) -> Self {
        Template::Var(name.to_owned())
    }

    pub fn ctor(ctor: &str, args: Vec<Template>) -> Self {
        Template::Ctor {
            ctor: Token::from(ctor),
            payloads: Vec::new(),
            args,
        }
    }

    pub fn call(func: &str, args: Vec<Template>) -> Self {
        Template::Call {
            func: func.to_owned(),
            args,
        }
    }

    pub fn singleton(var: &str) -> Self {
        Template::List(vec![PayloadRef::Var(var.to_owned())])
    }

    pub fn concat(a: Template, b: Template) -> Self {
        Template::Concat(Box::new(a), Box::new(b))
    }

    fn calls<'a>(&'a self, out: &mut Vec<(&'a str, &'a [Template])>) {
        match self {
            Template::Var(_) | Template::List(_) => {}
            Template::Ctor { args, .. } => args.iter().for_each(|a| a.calls(out)),
            Template::Call { func, args } => {
                out.push((func, args));
                args.iter().for_each(|a| a.calls(out));
            }
            Template::Concat(a, b) => {
                a.calls(out);
                b.calls(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub ctor: Token,
    pub payload_vars: Vec<String>,
    pub child_vars: Vec<String>,
}

impl Pattern {
    pub fn new(ctor: &str, payload_vars: &[&str], child_vars: &[&str]) -> Self {
        Pattern {
            ctor: Token::from(ctor),
            payload_vars: payload_vars.iter().map(|s| s.to_string()).collect(),
            child_vars: child_vars.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub pattern: Pattern,
    pub body: Template,
}

/// A structurally recursive function matching on its first parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub params: Vec<String>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("`{func}`: constructor `{ctor}` is not covered")]
    Uncovered { func: String, ctor: Token },
    #[error("`{func}`: constructor `{ctor}` is matched more than once")]
    Overlap { func: String, ctor: Token },
    #[error("`{func}`: pattern on unknown constructor `{ctor}`")]
    UnknownCtor { func: String, ctor: Token },
    #[error("`{func}`: pattern for `{ctor}` binds the wrong number of variables")]
    PatternArity { func: String, ctor: Token },
    #[error("`{func}`: recursive call is not on a strict subterm")]
    NotStructural { func: String },
    #[error("`{func}`: unbound variable `{var}`")]
    Unbound { func: String, var: String },
}

impl Program {
    pub fn clause_for(&self, ctor: &Token) -> Option<&Clause> {
        self.clauses.iter().find(|c| &c.pattern.ctor == ctor)
    }

    pub fn rule_id(&self, ctor: &Token) -> String {
        format!("{}/{}", self.name, ctor)
    }

    /// Clause coverage and structural decrease, checked against the datatype
    /// of the matched parameter.
    pub fn check(&self, def: &InductiveDef) -> Result<(), ProgramError> {
        let func = self.name.clone();
        for c in &def.constructors {
            match self.clauses.iter().filter(|cl| cl.pattern.ctor == c.name).count() {
                0 => {
                    return Err(ProgramError::Uncovered {
                        func,
                        ctor: c.name.clone(),
                    })
                }
                1 => {}
                _ => {
                    return Err(ProgramError::Overlap {
                        func,
                        ctor: c.name.clone(),
                    })
                }
            }
        }
        for cl in &self.clauses {
            let p = &cl.pattern;
            let c = def
                .constructor(p.ctor.as_str())
                .ok_or_else(|| ProgramError::UnknownCtor {
                    func: func.clone(),
                    ctor: p.ctor.clone(),
                })?;
            if c.recursive_arity != p.child_vars.len() || c.payload_kinds.len() != p.payload_vars.len() {
                return Err(ProgramError::PatternArity {
                    func,
                    ctor: p.ctor.clone(),
                });
            }
            let mut bound: Vec<&str> = self.params[1..].iter().map(String::as_str).collect();
            bound.extend(p.child_vars.iter().map(String::as_str));
            check_vars(&cl.body, &bound, &p.payload_vars, &func)?;
            let mut calls = Vec::new();
            cl.body.calls(&mut calls);
            for (f, args) in calls {
                if f == self.name {
                    let ok = matches!(args.first(), Some(Template::Var(v)) if p.child_vars.contains(v));
                    if !ok {
                        return Err(ProgramError::NotStructural { func });
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_vars(t: &Template, exprs: &[&str], payloads: &[String], func: &str) -> Result<(), ProgramError> {
    let payload_ok = |p: &PayloadRef| match p {
        PayloadRef::Lit(_) => Ok(()),
        PayloadRef::Var(v) if payloads.contains(v) => Ok(()),
        PayloadRef::Var(v) => Err(ProgramError::Unbound {
            func: func.to_owned(),
            var: v.clone(),
        }),
    };
    match t {
        Template::Var(v) if exprs.contains(&v.as_str()) => Ok(()),
        Template::Var(v) => Err(ProgramError::Unbound {
            func: func.to_owned(),
            var: v.clone(),
        }),
        Template::Ctor { payloads: ps, args, .. } => {
            ps.iter().try_for_each(payload_ok)?;
            args.iter().try_for_each(|a| check_vars(a, exprs, payloads, func))
        }
        Template::Call { args, .. } => args.iter().try_for_each(|a| check_vars(a, exprs, payloads, func)),
        Template::List(ps) => ps.iter().try_for_each(payload_ok),
        Template::Concat(a, b) => {
            check_vars(a, exprs, payloads, func)?;
            check_vars(b, exprs, payloads, func)
        }
    }
}

pub(crate) enum Binding<'a> {
    Expr(&'a Expr),
    Payload(&'a Token),
}

pub(crate) type Env<'a> = Vec<(&'a str, Binding<'a>)>;

fn lookup<'a>(env: &'a Env<'_>, name: &str) -> Option<&'a Binding<'a>> {
    env.iter().find(|(n, _)| *n == name).map(|(_, b)| b)
}

pub(crate) fn instantiate(t: &Template, env: &Env<'_>) -> Expr {
    let payload = |p: &PayloadRef| match p {
        PayloadRef::Lit(tok) => tok.clone(),
        PayloadRef::Var(v) => match lookup(env, v) {
            Some(Binding::Payload(tok)) => (*tok).clone(),
            _ => unreachable!("checked program binds payload `{v}`"),
        },
    };
    match t {
        Template::Var(v) => match lookup(env, v) {
            Some(Binding::Expr(e)) => (*e).clone(),
            _ => unreachable!("checked program binds `{v}`"),
        },
        Template::Ctor { ctor, payloads, args } => Expr::Ctor {
            ctor: ctor.clone(),
            payloads: payloads.iter().map(payload).collect(),
            args: args.iter().map(|a| instantiate(a, env)).collect(),
        },
        Template::Call { func, args } => Expr::Call {
            func: func.clone(),
            args: args.iter().map(|a| instantiate(a, env)).collect(),
        },
        Template::List(items) => Expr::List(items.iter().map(payload).collect()),
        Template::Concat(a, b) => Expr::concat(instantiate(a, env), instantiate(b, env)),
    }
}

pub mod builtin {
    pub const SUCC: &str = "s";
    pub const ADD: &str = "add";
    pub const PREORDER: &str = "preorder";
    pub const INORDER: &str = "inorder";
}

/// Binary successor: `01 ⇒ X0 01`, `X0 b ⇒ X1 b`, `X1 b ⇒ X0 (s b)`.
pub fn successor_program() -> Program {
    use Template as T;
    Program {
        name: builtin::SUCC.into(),
        params: vec!["n".into()],
        clauses: vec![
            Clause {
                pattern: Pattern::new(names::B01, &[], &[]),
                body: T::ctor(names::X0, vec![T::ctor(names::B01, vec![])]),
            },
            Clause {
                pattern: Pattern::new(names::X0, &[], &["b"]),
                body: T::ctor(names::X1, vec![T::var("b")]),
            },
            Clause {
                pattern: Pattern::new(names::X1, &[], &["b"]),
                body: T::ctor(names::X0, vec![T::call(builtin::SUCC, vec![T::var("b")])]),
            },
        ],
    }
}

/// Peano addition recursing on the first argument.
pub fn add_program() -> Program {
    use Template as T;
    Program {
        name: builtin::ADD.into(),
        params: vec!["n".into(), "m".into()],
        clauses: vec![
            Clause {
                pattern: Pattern::new(names::ONE, &[], &[]),
                body: T::ctor(names::SUCC, vec![T::var("m")]),
            },
            Clause {
                pattern: Pattern::new(names::SUCC, &[], &["p"]),
                body: T::ctor(names::SUCC, vec![T::call(builtin::ADD, vec![T::var("p"), T::var("m")])]),
            },
        ],
    }
}

/// `Branch v l r ⇒ inorder l ++ [v] ++ inorder r`.
pub fn inorder_program() -> Program {
    use Template as T;
    Program {
        name: builtin::INORDER.into(),
        params: vec!["t".into()],
        clauses: vec![
            Clause {
                pattern: Pattern::new(names::LEAF, &[], &[]),
                body: T::List(vec![]),
            },
            Clause {
                pattern: Pattern::new(names::BRANCH, &["v"], &["l", "r"]),
                body: T::concat(
                    T::call(builtin::INORDER, vec![T::var("l")]),
                    T::concat(T::singleton("v"), T::call(builtin::INORDER, vec![T::var("r")])),
                ),
            },
        ],
    }
}

/// `Branch v l r ⇒ [v] ++ preorder l ++ preorder r`.
pub fn preorder_program() -> Program {
    use Template as T;
    Program {
        name: builtin::PREORDER.into(),
        params: vec!["t".into()],
        clauses: vec![
            Clause {
                pattern: Pattern::new(names::LEAF, &[], &[]),
                body: T::List(vec![]),
            },
            Clause {
                pattern: Pattern::new(names::BRANCH, &["v"], &["l", "r"]),
                body: T::concat(
                    T::singleton("v"),
                    T::concat(
                        T::call(builtin::PREORDER, vec![T::var("l")]),
                        T::call(builtin::PREORDER, vec![T::var("r")]),
                    ),
                ),
            },
        ],
    }
}

/// A set of programs that may call one another.
#[derive(Debug, Clone, Default)]
pub struct Programs {
    programs: BTreeMap<String, Program>,
}

impl Programs {
    pub fn new() -> Self {
        Programs::default()
    }

    /// `s`, `add`, `preorder` and `inorder`.
    pub fn builtin() -> Self {
        let mut p = Programs::new();
        p.register(successor_program(), &bin_pos_def())
            .expect("s is structural");
        p.register(add_program(), &peano_def()).expect("add is structural");
        p.register(preorder_program(), &char_tree_def())
            .expect("preorder is structural");
        p.register(inorder_program(), &char_tree_def())
            .expect("inorder is structural");
        p
    }

    pub fn register(&mut self, program: Program, def: &InductiveDef) -> Result<(), ProgramError> {
        program.check(def)?;
        self.programs.insert(program.name.clone(), program);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Program> {
        self.programs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.programs.keys().map(String::as_str)
    }
}

/// The builtin programs, shared.
pub fn builtin_programs() -> &'static Programs {
    static BUILTIN: std::sync::OnceLock<Programs> = std::sync::OnceLock::new();
    BUILTIN.get_or_init(Programs::builtin)
}
