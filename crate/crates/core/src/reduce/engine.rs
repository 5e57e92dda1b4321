use thiserror::Error;

use super::expr::Expr;
use super::program::{instantiate, Binding, Env, Programs};
use crate::term::{Term, Token};

/// Rule id recorded when two literal lists are joined.
pub const CONCAT_RULE: &str = "++";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{func}` expects {expected} argument(s), got {got}")]
    Arity { func: String, expected: usize, got: usize },
    #[error("argument of `{0}` is not a constructor value")]
    NotAValue(String),
    #[error("`{func}` has no clause for `{ctor}`")]
    NoClause { func: String, ctor: Token },
    #[error("no normal form within {0} reduction levels")]
    FuelExhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    /// Child-index path to the rewritten node.
    pub path: Vec<usize>,
    pub rule: String,
}

/// One rewrite: a single redex for [`Programs::step_single`], a whole level
/// for [`Programs::step_level`]. For level steps, call redex paths refer to
/// `before` and list-join paths refer to the state right after the calls
/// were expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub before: Expr,
    pub redexes: Vec<Redex>,
    pub after: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: Expr,
    pub steps: Vec<ReductionStep>,
    pub result: Expr,
}

impl Trace {
    pub fn states(&self) -> Vec<&Expr> {
        let mut out = vec![&self.initial];
        out.extend(self.steps.iter().map(|s| &s.after));
        out
    }

    pub fn levels(&self) -> usize {
        self.steps.len()
    }
}

/// Outcome of [`Programs::reduce_k`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partial {
    pub expr: Expr,
    pub applied: usize,
    /// Normal form was reached before `k` levels were applied.
    pub early_normal: bool,
}

impl Programs {
    /// One δβι bundle for the call `func args`: pick the clause matching the
    /// first argument's constructor and instantiate its body.
    fn fire(&self, func: &str, args: &[Expr]) -> Result<(Expr, String), ReduceError> {
        let (out, prog, ctor) = self.fire_quiet(func, args)?;
        Ok((out, self.get(prog).expect("fired").rule_id(ctor)))
    }

    fn fire_quiet<'a>(&self, func: &'a str, args: &'a [Expr]) -> Result<(Expr, &'a str, &'a Token), ReduceError> {
        let prog = self
            .get(func)
            .ok_or_else(|| ReduceError::UnknownFunction(func.to_owned()))?;
        if args.len() != prog.params.len() {
            return Err(ReduceError::Arity {
                func: func.to_owned(),
                expected: prog.params.len(),
                got: args.len(),
            });
        }
        let (ctor, payloads, children) = match &args[0] {
            Expr::Ctor { ctor, payloads, args } => (ctor, payloads, args),
            _ => return Err(ReduceError::NotAValue(func.to_owned())),
        };
        let clause = prog.clause_for(ctor).ok_or_else(|| ReduceError::NoClause {
            func: func.to_owned(),
            ctor: ctor.clone(),
        })?;
        let mut env: Env<'_> = Vec::with_capacity(4);
        for (name, arg) in prog.params[1..].iter().zip(&args[1..]) {
            env.push((name, Binding::Expr(arg)));
        }
        for (name, p) in clause.pattern.payload_vars.iter().zip(payloads.iter()) {
            env.push((name, Binding::Payload(p)));
        }
        for (name, c) in clause.pattern.child_vars.iter().zip(children.iter()) {
            env.push((name, Binding::Expr(c)));
        }
        Ok((instantiate(&clause.body, &env), func, ctor))
    }

    /// Rewrite the leftmost-outermost redex: a pending call, or a
    /// concatenation of two literal lists. `None` when `e` is normal.
    pub fn step_single(&self, e: &Expr) -> Result<Option<ReductionStep>, ReduceError> {
        let Some(path) = first_redex(e, &mut Vec::new()) else {
            return Ok(None);
        };
        let mut rule = String::new();
        let after = rewrite_at(e, &path, &mut |node| match node {
            Expr::Call { func, args } => {
                let (out, r) = self.fire(func, args)?;
                rule = r;
                Ok(out)
            }
            Expr::Concat(a, b) => {
                rule = CONCAT_RULE.to_owned();
                let mut v = a.as_list().expect("redex").to_vec();
                v.extend_from_slice(b.as_list().expect("redex"));
                Ok(Expr::List(v))
            }
            _ => unreachable!("first_redex only returns calls and joins"),
        })?;
        Ok(Some(ReductionStep {
            before: e.clone(),
            redexes: vec![Redex { path, rule }],
            after,
        }))
    }

    /// Expand every outermost call at once, then join literal lists bottom-up.
    /// `None` when `e` is normal.
    pub fn step_level(&self, e: &Expr) -> Result<Option<ReductionStep>, ReduceError> {
        let mut redexes = Vec::new();
        let expanded = self.expand_outermost(e, &mut Vec::new(), &mut redexes)?;
        let after = join_lists(expanded, &mut Vec::new(), &mut redexes);
        if redexes.is_empty() {
            return Ok(None);
        }
        Ok(Some(ReductionStep {
            before: e.clone(),
            redexes,
            after,
        }))
    }

    fn expand_outermost(&self, e: &Expr, path: &mut Vec<usize>, redexes: &mut Vec<Redex>) -> Result<Expr, ReduceError> {
        Ok(match e {
            Expr::Call { func, args } => {
                let (out, rule) = self.fire(func, args)?;
                redexes.push(Redex {
                    path: path.clone(),
                    rule,
                });
                out
            }
            Expr::List(_) => e.clone(),
            Expr::Ctor { ctor, payloads, args } => {
                let mut new_args = Vec::with_capacity(args.len());
                for (i, a) in args.iter().enumerate() {
                    path.push(i);
                    new_args.push(self.expand_outermost(a, path, redexes)?);
                    path.pop();
                }
                Expr::Ctor {
                    ctor: ctor.clone(),
                    payloads: payloads.clone(),
                    args: new_args.into(),
                }
            }
            Expr::Concat(a, b) => {
                path.push(0);
                let a = self.expand_outermost(a, path, redexes)?;
                path.pop();
                path.push(1);
                let b = self.expand_outermost(b, path, redexes)?;
                path.pop();
                Expr::concat(a, b)
            }
        })
    }

    /// Apply [`Programs::step_level`] until normal form, spending one unit of
    /// `fuel` per level.
    pub fn reduce(&self, e: &Expr, fuel: usize) -> Result<Trace, ReduceError> {
        let mut steps = Vec::new();
        let mut cur = e.clone();
        loop {
            match self.step_level(&cur)? {
                None => break,
                Some(_) if steps.len() == fuel => return Err(ReduceError::FuelExhausted(fuel)),
                Some(step) => {
                    cur = step.after.clone();
                    steps.push(step);
                }
            }
        }
        Ok(Trace {
            initial: e.clone(),
            steps,
            result: cur,
        })
    }

    /// The normal form and level count of `e`, without keeping the trace.
    pub fn normal_form(&self, e: &Expr, fuel: usize) -> Result<(Expr, usize), ReduceError> {
        let mut cur = e.clone();
        let mut levels = 0;
        loop {
            let mut changed = false;
            let expanded = self.expand_owned(cur, &mut changed)?;
            cur = join_owned(expanded, &mut changed);
            if !changed {
                return Ok((cur, levels));
            }
            if levels == fuel {
                return Err(ReduceError::FuelExhausted(fuel));
            }
            levels += 1;
        }
    }

    fn expand_owned(&self, e: Expr, changed: &mut bool) -> Result<Expr, ReduceError> {
        Ok(match e {
            Expr::Call { func, args } => {
                *changed = true;
                self.fire_quiet(&func, &args)?.0
            }
            Expr::List(_) => e,
            Expr::Ctor { .. } if !e.contains_call() => e,
            Expr::Ctor { ctor, payloads, args } => Expr::Ctor {
                ctor,
                payloads,
                args: args
                    .iter()
                    .map(|a| self.expand_owned(a.clone(), changed))
                    .collect::<Result<_, _>>()?,
            },
            Expr::Concat(mut a, mut b) => {
                *a = self.expand_owned(take(&mut a), changed)?;
                *b = self.expand_owned(take(&mut b), changed)?;
                Expr::Concat(a, b)
            }
        })
    }

    /// [`Programs::reduce`] with a budget of twice the state size.
    pub fn normalize(&self, e: &Expr) -> Result<Trace, ReduceError> {
        self.reduce(e, default_fuel(e))
    }

    /// The normal form of `e` under the [`Programs::normalize`] budget.
    pub fn evaluate(&self, e: &Expr) -> Result<Expr, ReduceError> {
        Ok(self.normal_form(e, default_fuel(e))?.0)
    }

    /// Apply `k` levels, stopping early at normal form.
    pub fn reduce_k(&self, e: &Expr, k: usize) -> Result<Partial, ReduceError> {
        let mut cur = e.clone();
        for applied in 0..k {
            match self.step_level(&cur)? {
                Some(step) => cur = step.after,
                None => {
                    return Ok(Partial {
                        expr: cur,
                        applied,
                        early_normal: true,
                    })
                }
            }
        }
        Ok(Partial {
            expr: cur,
            applied: k,
            early_normal: false,
        })
    }

    /// Number of levels `func args` takes to reach normal form.
    pub fn recursion_depth(&self, func: &str, args: &[Term]) -> Result<usize, ReduceError> {
        let e = Expr::apply(func, args);
        Ok(self.normal_form(&e, default_fuel(&e))?.1)
    }
}

pub fn default_fuel(e: &Expr) -> usize {
    2 * e.size()
}

fn first_redex(e: &Expr, path: &mut Vec<usize>) -> Option<Vec<usize>> {
    match e {
        Expr::Call { .. } => return Some(path.clone()),
        Expr::Concat(a, b) if a.as_list().is_some() && b.as_list().is_some() => return Some(path.clone()),
        _ => {}
    }
    for (i, c) in e.children().into_iter().enumerate() {
        path.push(i);
        if let Some(p) = first_redex(c, path) {
            return Some(p);
        }
        path.pop();
    }
    None
}

fn rewrite_at<F>(e: &Expr, path: &[usize], f: &mut F) -> Result<Expr, ReduceError>
where
    F: FnMut(&Expr) -> Result<Expr, ReduceError>,
{
    let Some((&i, rest)) = path.split_first() else {
        return f(e);
    };
    Ok(match e {
        Expr::Ctor { ctor, payloads, args } => {
            let mut args = args.to_vec();
            args[i] = rewrite_at(&args[i], rest, f)?;
            Expr::Ctor {
                ctor: ctor.clone(),
                payloads: payloads.clone(),
                args: args.into(),
            }
        }
        Expr::Call { func, args } => {
            let mut args = args.clone();
            args[i] = rewrite_at(&args[i], rest, f)?;
            Expr::Call {
                func: func.clone(),
                args,
            }
        }
        Expr::Concat(a, b) if i == 0 => Expr::concat(rewrite_at(a, rest, f)?, (**b).clone()),
        Expr::Concat(a, b) => Expr::concat((**a).clone(), rewrite_at(b, rest, f)?),
        Expr::List(_) => unreachable!("lists have no children"),
    })
}

fn take(e: &mut Expr) -> Expr {
    std::mem::replace(e, Expr::List(Vec::new()))
}

fn join_owned(e: Expr, changed: &mut bool) -> Expr {
    match e {
        Expr::Concat(mut a, mut b) => {
            *a = join_owned(take(&mut a), changed);
            *b = join_owned(take(&mut b), changed);
            match (&mut *a, &*b) {
                (Expr::List(x), Expr::List(y)) => {
                    *changed = true;
                    x.extend_from_slice(y);
                    *a
                }
                _ => Expr::Concat(a, b),
            }
        }
        Expr::Ctor { .. } if e.is_normal() => e,
        Expr::Ctor { ctor, payloads, args } => Expr::Ctor {
            ctor,
            payloads,
            args: args.iter().map(|a| join_owned(a.clone(), changed)).collect(),
        },
        other => other,
    }
}

fn join_lists(e: Expr, path: &mut Vec<usize>, redexes: &mut Vec<Redex>) -> Expr {
    match e {
        Expr::Concat(a, b) => {
            path.push(0);
            let a = join_lists(*a, path, redexes);
            path.pop();
            path.push(1);
            let b = join_lists(*b, path, redexes);
            path.pop();
            match (a, b) {
                (Expr::List(mut x), Expr::List(y)) => {
                    redexes.push(Redex {
                        path: path.clone(),
                        rule: CONCAT_RULE.to_owned(),
                    });
                    x.extend(y);
                    Expr::List(x)
                }
                (a, b) => Expr::concat(a, b),
            }
        }
        Expr::Ctor { ctor, payloads, args } => Expr::Ctor {
            ctor,
            payloads,
            args: args
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    path.push(i);
                    let a = join_lists(a.clone(), path, redexes);
                    path.pop();
                    a
                })
                .collect(),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::{bin_encode, bin_value_u64, peano};
    use crate::reduce::builtin_programs;
    use crate::term::{linearize, tokens, Order, TokenSeq};
    use crate::tree::{branch, cat_tree, leaf, single};

    fn bin(text: &str) -> Term {
        crate::term::delinearize(
            &TokenSeq::parse(text, Order::ConstructorReverse),
            &crate::term::bin_pos_def(),
        )
        .unwrap()
    }

    fn s(text: &str) -> Expr {
        Expr::apply("s", &[bin(text)])
    }

    #[test]
    fn single_step_of_eleven() {
        let step = builtin_programs().step_single(&s("X1 X1 X0 01")).unwrap().unwrap();
        let want = Expr::wrap(&"X0".into(), s("X1 X0 01"));
        assert_eq!(step.after, want);
        assert_eq!(
            step.redexes,
            vec![Redex {
                path: vec![],
                rule: "s/X1".into()
            }]
        );
    }

    #[test]
    fn lean_normal_form_matches_trace() {
        let p = builtin_programs();
        for t in crate::tree::enumerate_trees(2, &['a', 'b']) {
            for f in ["inorder", "preorder"] {
                let e = Expr::apply(f, std::slice::from_ref(&t));
                let tr = p.normalize(&e).unwrap();
                assert_eq!(
                    p.normal_form(&e, default_fuel(&e)).unwrap(),
                    (tr.result.clone(), tr.levels())
                );
            }
        }
        for v in 1..200 {
            let e = Expr::apply("s", &[bin_encode(v).unwrap()]);
            let tr = p.normalize(&e).unwrap();
            assert_eq!(p.normal_form(&e, 64).unwrap(), (tr.result.clone(), tr.levels()));
        }
        let e = s("X1 X1 X0 01");
        assert_eq!(p.normal_form(&e, 2), Err(ReduceError::FuelExhausted(2)));
    }

    #[test]
    fn normal_form_has_no_step() {
        let v = Expr::value(&bin("X0 01"));
        assert_eq!(builtin_programs().step_single(&v).unwrap(), None);
        assert_eq!(builtin_programs().step_level(&v).unwrap(), None);
    }

    #[test]
    fn add_two_one() {
        let e = Expr::apply("add", &[peano(2).unwrap(), peano(1).unwrap()]);
        let step = builtin_programs().step_single(&e).unwrap().unwrap();
        assert_eq!(step.after.to_string(), "S (add I I)");
        let tr = builtin_programs().normalize(&e).unwrap();
        assert_eq!(tr.levels(), 2);
        assert_eq!(tr.result.to_string(), "S (S I)");
    }

    #[test]
    fn successor_of_eleven_in_three_levels() {
        let tr = builtin_programs().normalize(&s("X1 X1 X0 01")).unwrap();
        assert_eq!(tr.levels(), 3);
        let out = tr.result.to_term().unwrap();
        assert_eq!(linearize(&out).text(), "X0 X0 X1 01");
    }

    #[test]
    fn inorder_levels_match_the_displayed_chain() {
        let p = builtin_programs();
        let e = Expr::apply("inorder", &[cat_tree()]);
        let tr = p.normalize(&e).unwrap();
        let shown: Vec<String> = tr.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(
            shown,
            vec![
                "inorder (Branch 'a' (Branch 'c' Leaf Leaf) (Branch 't' Leaf Leaf))",
                "inorder (Branch 'c' Leaf Leaf) ++ ['a'] ++ inorder (Branch 't' Leaf Leaf)",
                "(inorder Leaf ++ ['c'] ++ inorder Leaf) ++ ['a'] ++ inorder Leaf ++ ['t'] ++ inorder Leaf",
                "['c'; 'a'; 't']",
            ]
        );
    }

    #[test]
    fn preorder_of_cat() {
        let tr = builtin_programs()
            .normalize(&Expr::apply("preorder", &[cat_tree()]))
            .unwrap();
        assert_eq!(tr.result, Expr::List(tokens("a c t")));
        assert_eq!(tr.levels(), 3);
    }

    #[test]
    fn level_two_expands_both_subtrees() {
        let p = builtin_programs();
        let e = Expr::apply("inorder", &[cat_tree()]);
        let l1 = p.step_level(&e).unwrap().unwrap();
        assert_eq!(l1.redexes.len(), 1);
        let l2 = p.step_level(&l1.after).unwrap().unwrap();
        assert_eq!(l2.redexes.len(), 2);
        assert!(l2.redexes.iter().all(|r| r.rule == "inorder/Branch"));
    }

    #[test]
    fn reduce_k_variants() {
        let p = builtin_programs();
        let e = s("X1 X1 01");
        assert_eq!(p.reduce_k(&e, 0).unwrap().expr, e);
        // X1 X1 01 -> X0 (s (X1 01)) -> X0 X0 (s 01)
        let two = p.reduce_k(&e, 2).unwrap();
        assert_eq!(two.expr.to_string(), "X0 (X0 (s 01))");
        assert!(!two.early_normal);
        let many = p.reduce_k(&e, 10).unwrap();
        assert!(many.early_normal);
        assert_eq!(many.applied, 3);
    }

    #[test]
    fn recursion_depths() {
        let p = builtin_programs();
        assert_eq!(p.recursion_depth("s", &[bin("01")]).unwrap(), 1);
        assert_eq!(p.recursion_depth("s", &[bin("X1 X1 X0 01")]).unwrap(), 3);
        for k in 0..=16 {
            let mut t = Term::leaf("01");
            for _ in 0..k {
                t = t.wrap("X1");
            }
            assert_eq!(p.recursion_depth("s", &[t]).unwrap(), k + 1);
        }
    }

    #[test]
    fn fuel_exhaustion() {
        let e = s("X1 X1 X1 01");
        assert_eq!(builtin_programs().reduce(&e, 2), Err(ReduceError::FuelExhausted(2)));
        assert!(builtin_programs().reduce(&e, 4).is_ok());
    }

    #[test]
    fn call_on_non_value_is_an_error() {
        let e = Expr::call("s", vec![Expr::List(vec![])]);
        assert_eq!(
            builtin_programs().step_single(&e),
            Err(ReduceError::NotAValue("s".into()))
        );
        let e = Expr::call("nope", vec![]);
        assert!(matches!(
            builtin_programs().step_level(&e),
            Err(ReduceError::UnknownFunction(_))
        ));
        let e = Expr::call("add", vec![Expr::value(&peano(1).unwrap())]);
        assert!(matches!(
            builtin_programs().step_level(&e),
            Err(ReduceError::Arity { .. })
        ));
    }

    #[test]
    fn single_steps_join_lists_one_at_a_time() {
        let p = builtin_programs();
        let mut cur = Expr::apply("preorder", &[branch('x', single('y'), leaf())]);
        let mut n = 0;
        while let Some(step) = p.step_single(&cur).unwrap() {
            assert_eq!(step.redexes.len(), 1);
            cur = step.after;
            n += 1;
        }
        assert_eq!(cur, Expr::List(tokens("x y")));
        // five calls (x, y and three leaves) plus four joins
        assert_eq!(n, 5 + 4);
    }

    #[test]
    fn successor_value_sweep() {
        let p = builtin_programs();
        for n in 1..3000u64 {
            let tr = p.normalize(&Expr::apply("s", &[bin_encode(n).unwrap()])).unwrap();
            assert_eq!(bin_value_u64(&tr.result.to_term().unwrap()).unwrap(), n + 1);
        }
    }
}
