//! Surface forms of reduction states and traces.
//!
//! Successor states print as the emitted constructor prefix followed by the
//! pending argument in parentheses: `X0 X0 ( X0 01 )`. Traversal states print
//! in the UNROLL grammar: a pending call on a branch is `UNROLL[ <tree> ]`, a
//! pending call on a leaf is `EMPTY`, and emitted values are bare.

use thiserror::Error;

use super::engine::Trace;
use super::expr::Expr;
use super::program::builtin;
use crate::term::{bin_pos_def, delinearize, join, linearize, names, Order, Term, Token, TokenSeq};
use crate::tree::{tree_parse, tree_serialize, write_node, CLOSE, OPEN};

pub const UNROLL_OPEN: &str = "UNROLL[";
pub const UNROLL_CLOSE: &str = "]";
pub const EMPTY: &str = "EMPTY";
/// Older name for the partial-traversal marker; accepted when reading.
pub const REDUCE_ALIAS: &str = "REDUCE";
pub const PAREN_SEP: &str = "=";
pub const ARROW_SEP: &str = "->";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStyle {
    /// `( X1 X0 01 ) = X0 ( X0 01 ) = X0 X1 01`
    Paren,
    /// UNROLL-grammar states joined by `->`.
    Arrow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("state cannot be rendered in {0:?} style")]
    StyleMismatch(TraceStyle),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateParseError {
    #[error("empty state")]
    Empty,
    #[error("misplaced bracket at token {0}")]
    Bracket(usize),
    #[error("unexpected token `{tok}` at {at}")]
    BadToken { tok: Token, at: usize },
    #[error("bad subtree inside UNROLL[ ]: {0}")]
    Tree(#[from] crate::tree::TreeError),
}

/// Paren-style tokens for a state of a unary recursive function.
pub fn paren_state(e: &Expr) -> Result<Vec<Token>, RenderError> {
    let mut out = Vec::new();
    let mut cur = e;
    loop {
        match cur {
            Expr::Ctor { ctor, payloads, args } if payloads.is_empty() && args.len() == 1 => {
                out.push(ctor.clone());
                cur = &args[0];
            }
            Expr::Ctor { .. } => {
                let t = cur.to_term().ok_or(RenderError::StyleMismatch(TraceStyle::Paren))?;
                out.extend(linearize(&t).tokens);
                return Ok(out);
            }
            Expr::Call { args, .. } if args.len() == 1 => {
                let t = args[0].to_term().ok_or(RenderError::StyleMismatch(TraceStyle::Paren))?;
                out.push(Token::from(OPEN));
                out.extend(linearize(&t).tokens);
                out.push(Token::from(CLOSE));
                return Ok(out);
            }
            _ => return Err(RenderError::StyleMismatch(TraceStyle::Paren)),
        }
    }
}

/// One item of a flattened traversal state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    Value(Token),
    /// A pending traversal call on this subtree.
    Pending(Term),
}

/// Flatten a traversal state into items, left to right.
pub fn traversal_items(e: &Expr) -> Result<Vec<Item>, RenderError> {
    fn go(e: &Expr, out: &mut Vec<Item>) -> Result<(), RenderError> {
        match e {
            Expr::List(v) => out.extend(v.iter().cloned().map(Item::Value)),
            Expr::Concat(a, b) => {
                go(a, out)?;
                go(b, out)?;
            }
            Expr::Call { args, .. } if args.len() == 1 => {
                let t = args[0].to_term().filter(|t| t.is(names::LEAF) || t.is(names::BRANCH));
                out.push(Item::Pending(t.ok_or(RenderError::StyleMismatch(TraceStyle::Arrow))?));
            }
            _ => return Err(RenderError::StyleMismatch(TraceStyle::Arrow)),
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(e, &mut out)?;
    Ok(out)
}

pub fn render_items(items: &[Item]) -> Vec<Token> {
    let mut out = Vec::new();
    for it in items {
        match it {
            Item::Value(v) => out.push(v.clone()),
            Item::Pending(t) if t.is(names::LEAF) => out.push(Token::from(EMPTY)),
            Item::Pending(t) => {
                out.push(Token::from(UNROLL_OPEN));
                write_node(t, &mut out).expect("pending traversal argument is a tree");
                out.push(Token::from(UNROLL_CLOSE));
            }
        }
    }
    out
}

/// UNROLL-grammar tokens for a traversal state.
pub fn unroll_state(e: &Expr) -> Result<Vec<Token>, RenderError> {
    Ok(render_items(&traversal_items(e)?))
}

/// Parse UNROLL-grammar tokens back into items. `REDUCE[` is read as
/// `UNROLL[`.
pub fn parse_items(tokens: &[Token]) -> Result<Vec<Item>, StateParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match t.as_str() {
            UNROLL_OPEN | "REDUCE[" | REDUCE_ALIAS => {
                let mut j = i + 1;
                if t == REDUCE_ALIAS && tokens.get(j).map(Token::as_str) == Some("[") {
                    j += 1;
                }
                let start = j;
                let mut depth = 0i64;
                while j < tokens.len() {
                    match tokens[j].as_str() {
                        OPEN => depth += 1,
                        CLOSE => depth -= 1,
                        UNROLL_CLOSE if depth == 0 => break,
                        _ => {}
                    }
                    j += 1;
                }
                if j == tokens.len() {
                    return Err(StateParseError::Bracket(i));
                }
                out.push(Item::Pending(tree_parse(&tokens[start..j])?));
                i = j + 1;
            }
            EMPTY => {
                out.push(Item::Pending(crate::tree::leaf()));
                i += 1;
            }
            UNROLL_CLOSE | OPEN | CLOSE | "[" => return Err(StateParseError::Bracket(i)),
            "LEAF" | PAREN_SEP | ARROW_SEP => return Err(StateParseError::BadToken { tok: t.clone(), at: i }),
            _ if t.as_str().chars().count() == 1 => {
                out.push(Item::Value(t.clone()));
                i += 1;
            }
            _ => return Err(StateParseError::BadToken { tok: t.clone(), at: i }),
        }
    }
    Ok(out)
}

/// Expand every pending item once, using `func`'s clause shape.
pub fn expand_items(func: &str, items: &[Item]) -> Vec<Item> {
    let mut out = Vec::with_capacity(items.len() * 3);
    for it in items {
        match it {
            Item::Value(_) => out.push(it.clone()),
            Item::Pending(t) if t.is(names::LEAF) => {}
            Item::Pending(t) => {
                let v = Item::Value(t.payloads[0].clone());
                let l = Item::Pending(t.children[0].clone());
                let r = Item::Pending(t.children[1].clone());
                if func == builtin::PREORDER {
                    out.extend([v, l, r]);
                } else {
                    out.extend([l, v, r]);
                }
            }
        }
    }
    out
}

pub fn items_normal(items: &[Item]) -> bool {
    items.iter().all(|i| matches!(i, Item::Value(_)))
}

/// The expression a flattened traversal state stands for (right-nested).
pub fn items_to_expr(func: &str, items: &[Item]) -> Expr {
    let mut parts: Vec<Expr> = Vec::new();
    let mut run: Vec<Token> = Vec::new();
    for it in items {
        match it {
            Item::Value(v) => run.push(v.clone()),
            Item::Pending(t) => {
                if !run.is_empty() {
                    parts.push(Expr::List(std::mem::take(&mut run)));
                }
                parts.push(Expr::apply(func, std::slice::from_ref(t)));
            }
        }
    }
    if !run.is_empty() || parts.is_empty() {
        parts.push(Expr::List(run));
    }
    let mut acc = parts.pop().expect("non-empty");
    while let Some(p) = parts.pop() {
        acc = Expr::concat(p, acc);
    }
    acc
}

/// A successor-style state: emitted constructor prefix plus an optional
/// pending argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParenState {
    pub prefix: Vec<Token>,
    pub pending: Option<Vec<Token>>,
}

impl ParenState {
    pub fn tokens(&self) -> Vec<Token> {
        let mut out = self.prefix.clone();
        if let Some(p) = &self.pending {
            out.push(Token::from(OPEN));
            out.extend(p.iter().cloned());
            out.push(Token::from(CLOSE));
        }
        out
    }

    /// All non-bracket tokens in order.
    pub fn content(&self) -> Vec<Token> {
        let mut out = self.prefix.clone();
        if let Some(p) = &self.pending {
            out.extend(p.iter().cloned());
        }
        out
    }

    /// The expression over `func` this state denotes, if the tokens form a
    /// well-typed `bin_pos` value.
    pub fn to_expr(&self, func: &str) -> Option<Expr> {
        let def = bin_pos_def();
        let inner = match &self.pending {
            Some(p) => {
                let t = delinearize(&TokenSeq::new(p.clone(), Order::ConstructorReverse), &def).ok()?;
                Expr::apply(func, &[t])
            }
            None => {
                let n = self
                    .prefix
                    .iter()
                    .rposition(|t| def.constructor(t.as_str()).is_none_or(|c| c.is_base()))?;
                let t = delinearize(
                    &TokenSeq::new(self.prefix[n..].to_vec(), Order::ConstructorReverse),
                    &def,
                )
                .ok()?;
                return wrap_prefix(&self.prefix[..n], Expr::value(&t), &def);
            }
        };
        wrap_prefix(&self.prefix, inner, &def)
    }
}

fn wrap_prefix(prefix: &[Token], inner: Expr, def: &crate::term::InductiveDef) -> Option<Expr> {
    let mut e = inner;
    for t in prefix.iter().rev() {
        let c = def.constructor(t.as_str())?;
        if c.recursive_arity != 1 || !c.payload_kinds.is_empty() {
            return None;
        }
        e = Expr::wrap(t, e);
    }
    Some(e)
}

/// Split a paren-style state. Accepts parentheses glued to neighbouring
/// tokens (`(X1 01)`) and `XO` for `X0`.
pub fn parse_paren_state(tokens: &[Token]) -> Result<ParenState, StateParseError> {
    if tokens.is_empty() {
        return Err(StateParseError::Empty);
    }
    let open = tokens.iter().position(|t| t == OPEN);
    let close = tokens.iter().position(|t| t == CLOSE);
    let count = |s: &str| tokens.iter().filter(|t| *t == s).count();
    match (open, close) {
        (None, None) => Ok(ParenState {
            prefix: tokens.to_vec(),
            pending: None,
        }),
        (Some(o), Some(c)) if count(OPEN) == 1 && count(CLOSE) == 1 && c == tokens.len() - 1 && o + 1 < c => {
            Ok(ParenState {
                prefix: tokens[..o].to_vec(),
                pending: Some(tokens[o + 1..c].to_vec()),
            })
        }
        (Some(o), _) if count(OPEN) > 1 || close.is_none() => Err(StateParseError::Bracket(o)),
        (_, Some(c)) => Err(StateParseError::Bracket(c)),
        (Some(o), None) => Err(StateParseError::Bracket(o)),
    }
}

/// Tokenize trace text: whitespace separated, with `(` and `)` split off the
/// tokens they are glued to, and `XO` read as `X0`.
pub fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut buf = String::new();
        for ch in word.chars() {
            if ch == '(' || ch == ')' {
                if !buf.is_empty() {
                    out.push(crate::term::canonical_alias(&Token::from(std::mem::take(&mut buf))));
                }
                out.push(Token::from(ch));
            } else {
                buf.push(ch);
            }
        }
        if !buf.is_empty() {
            out.push(crate::term::canonical_alias(&Token::from(buf)));
        }
    }
    out
}

/// Split a trace's token stream on `sep`.
pub fn split_states(tokens: &[Token], sep: &str) -> Vec<Vec<Token>> {
    tokens.split(|t| t == sep).map(<[Token]>::to_vec).collect()
}

pub fn render_state(e: &Expr, style: TraceStyle) -> Result<Vec<Token>, RenderError> {
    match style {
        TraceStyle::Paren => paren_state(e),
        TraceStyle::Arrow => unroll_state(e),
    }
}

/// The conventional style for a builtin program's traces.
pub fn style_for(func: &str) -> Option<TraceStyle> {
    match func {
        builtin::SUCC => Some(TraceStyle::Paren),
        builtin::INORDER | builtin::PREORDER => Some(TraceStyle::Arrow),
        _ => None,
    }
}

pub fn render_trace_tokens(trace: &Trace, style: TraceStyle) -> Result<Vec<Token>, RenderError> {
    let sep = match style {
        TraceStyle::Paren => PAREN_SEP,
        TraceStyle::Arrow => ARROW_SEP,
    };
    let mut out = Vec::new();
    for (i, s) in trace.states().into_iter().enumerate() {
        if i > 0 {
            out.push(Token::from(sep));
        }
        out.extend(render_state(s, style)?);
    }
    Ok(out)
}

/// Every state of the trace, joined by ` = ` (paren) or ` -> ` (arrow).
pub fn render_trace(trace: &Trace, style: TraceStyle) -> Result<String, RenderError> {
    Ok(join(&render_trace_tokens(trace, style)?))
}

/// Values-only rendering of a finished traversal, or the UNROLL form of a
/// partial one.
pub fn traversal_target(e: &Expr) -> Result<Vec<Token>, RenderError> {
    unroll_state(e)
}

pub fn serialize_tree_tokens(t: &Term) -> Option<Vec<Token>> {
    tree_serialize(t).ok().map(|s| s.tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::builtin_programs;
    use crate::term::tokens;
    use crate::tree::cat_tree;

    fn s_trace(text: &str) -> Trace {
        let t = crate::binary::bin_parse(&tokens(text), Order::ConstructorReverse).unwrap();
        builtin_programs().normalize(&Expr::apply("s", &[t])).unwrap()
    }

    #[test]
    fn paren_trace_of_five() {
        let tr = s_trace("X1 X0 01");
        assert_eq!(
            render_trace(&tr, TraceStyle::Paren).unwrap(),
            "( X1 X0 01 ) = X0 ( X0 01 ) = X0 X1 01"
        );
    }

    #[test]
    fn base_case_trace() {
        assert_eq!(
            render_trace(&s_trace("01"), TraceStyle::Paren).unwrap(),
            "( 01 ) = X0 01"
        );
    }

    #[test]
    fn normal_expression_is_one_state() {
        let v = Expr::value(&crate::binary::bin_encode(6).unwrap());
        let tr = builtin_programs().normalize(&v).unwrap();
        assert_eq!(render_trace(&tr, TraceStyle::Paren).unwrap(), "X0 X1 01");
    }

    #[test]
    fn inorder_arrow_trace() {
        let tr = builtin_programs()
            .normalize(&Expr::apply("inorder", &[cat_tree()]))
            .unwrap();
        let text = render_trace(&tr, TraceStyle::Arrow).unwrap();
        assert_eq!(
            text,
            "UNROLL[ a ( c LEAF LEAF ) ( t LEAF LEAF ) ] -> UNROLL[ c LEAF LEAF ] a UNROLL[ t LEAF LEAF ] \
             -> EMPTY c EMPTY a EMPTY t EMPTY -> c a t"
        );
        assert_eq!(text.split(" -> ").count(), 4);
    }

    #[test]
    fn style_mismatch() {
        let tr = builtin_programs()
            .normalize(&Expr::apply("inorder", &[cat_tree()]))
            .unwrap();
        assert_eq!(
            render_trace(&tr, TraceStyle::Paren),
            Err(RenderError::StyleMismatch(TraceStyle::Paren))
        );
        let tr = s_trace("X1 01");
        assert_eq!(
            render_trace(&tr, TraceStyle::Arrow),
            Err(RenderError::StyleMismatch(TraceStyle::Arrow))
        );
    }

    #[test]
    fn lex_splits_glued_parens() {
        let t = lex("(X1 X0 X1 X1 01) = X0 ( X0 X1 X1 01)");
        assert_eq!(join(&t), "( X1 X0 X1 X1 01 ) = X0 ( X0 X1 X1 01 )");
        assert_eq!(join(&lex("XO (XO 01)")), "X0 ( X0 01 )");
    }

    #[test]
    fn paren_state_parsing() {
        let st = parse_paren_state(&tokens("X0 X0 ( X0 01 )")).unwrap();
        assert_eq!(join(&st.prefix), "X0 X0");
        assert_eq!(join(st.pending.as_ref().unwrap()), "X0 01");
        assert_eq!(st.to_expr("s").unwrap().to_string(), "X0 (X0 (s (X0 01)))");
        let done = parse_paren_state(&tokens("X0 X1 01")).unwrap();
        assert_eq!(done.pending, None);
        assert!(done.to_expr("s").unwrap().is_normal());
        for bad in ["( X0 01", "X0 ) 01", "( X0 ) 01", "( ( 01 ) )", "( )", ""] {
            assert!(parse_paren_state(&tokens(bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn items_round_trip() {
        let toks = tokens("UNROLL[ c LEAF LEAF ] a EMPTY");
        let items = parse_items(&toks).unwrap();
        assert_eq!(render_items(&items), toks);
        let e = items_to_expr("inorder", &items);
        assert_eq!(unroll_state(&e).unwrap(), toks);
        assert_eq!(
            parse_items(&tokens("REDUCE[ c LEAF LEAF ]")).unwrap(),
            parse_items(&tokens("UNROLL[ c LEAF LEAF ]")).unwrap()
        );
        assert!(parse_items(&tokens("UNROLL[ c LEAF LEAF")).is_err());
        assert!(parse_items(&tokens("a ]")).is_err());
        assert!(parse_items(&tokens("UNROLL[ c LEAF ]")).is_err());
    }

    #[test]
    fn item_expansion_matches_engine_levels() {
        for func in ["inorder", "preorder"] {
            let p = builtin_programs();
            let mut e = Expr::apply(func, &[cat_tree()]);
            let mut items = traversal_items(&e).unwrap();
            while let Some(step) = p.step_level(&e).unwrap() {
                e = step.after;
                items = expand_items(func, &items);
                assert_eq!(traversal_items(&e).unwrap(), items);
            }
            assert!(items_normal(&items));
        }
    }
}
