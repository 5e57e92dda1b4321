//! Character trees and their parenthesized serialization.
//!
//! ```text
//! node   ::= value branch branch
//! branch ::= LEAF | ( node )
//! ```

use num_bigint::BigUint;
use thiserror::Error;

use crate::term::{names, Order, Term, Token, TokenSeq};

pub const LEAF_TOKEN: &str = "LEAF";
pub const OPEN: &str = "(";
pub const CLOSE: &str = ")";

pub fn leaf() -> Term {
    Term::leaf(names::LEAF)
}

pub fn branch(value: char, left: Term, right: Term) -> Term {
    Term::node(names::BRANCH, vec![Token::from(value)], vec![left, right])
}

/// `Branch v Leaf Leaf`.
pub fn single(value: char) -> Term {
    branch(value, leaf(), leaf())
}

/// `Branch 'a' (Branch 'c' Leaf Leaf) (Branch 't' Leaf Leaf)`.
pub fn cat_tree() -> Term {
    branch('a', single('c'), single('t'))
}

pub fn is_leaf(t: &Term) -> bool {
    t.is(names::LEAF)
}

/// Leaf has depth 0; a branch is one deeper than its deepest child.
pub fn depth(t: &Term) -> usize {
    if is_leaf(t) {
        0
    } else {
        1 + t.children.iter().map(depth).max().unwrap_or(0)
    }
}

pub fn node_count(t: &Term) -> usize {
    if is_leaf(t) {
        0
    } else {
        1 + t.children.iter().map(node_count).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a bare Leaf has no serialization")]
    BareLeaf,
    #[error("unbalanced parentheses at token {0}")]
    Unbalanced(usize),
    #[error("missing branch at token {0}")]
    MissingBranch(usize),
    #[error("expected a node value at token {0}")]
    MissingValue(usize),
    #[error("{0} trailing token(s)")]
    Trailing(usize),
    #[error("not a char tree term")]
    NotATree,
}

/// Serialize a non-empty tree: the value, then each child as `LEAF` or a
/// parenthesized subtree.
pub fn tree_serialize(t: &Term) -> Result<TokenSeq, TreeError> {
    if is_leaf(t) {
        return Err(TreeError::BareLeaf);
    }
    let mut out = Vec::new();
    write_node(t, &mut out)?;
    Ok(TokenSeq::new(out, Order::TreeAppendix))
}

pub(crate) fn write_node(t: &Term, out: &mut Vec<Token>) -> Result<(), TreeError> {
    if !t.is(names::BRANCH) || t.children.len() != 2 || t.payloads.len() != 1 {
        return Err(TreeError::NotATree);
    }
    out.push(t.payloads[0].clone());
    for c in &t.children {
        if is_leaf(c) {
            out.push(Token::from(LEAF_TOKEN));
        } else {
            out.push(Token::from(OPEN));
            write_node(c, out)?;
            out.push(Token::from(CLOSE));
        }
    }
    Ok(())
}

fn is_structural(tok: &Token) -> bool {
    matches!(tok.as_str(), LEAF_TOKEN | OPEN | CLOSE)
}

/// Inverse of [`tree_serialize`].
pub fn tree_parse(tokens: &[Token]) -> Result<Term, TreeError> {
    let mut pos = 0;
    let t = parse_node(tokens, &mut pos)?;
    if pos != tokens.len() {
        if tokens[pos] == CLOSE {
            return Err(TreeError::Unbalanced(pos));
        }
        return Err(TreeError::Trailing(tokens.len() - pos));
    }
    Ok(t)
}

fn parse_node(tokens: &[Token], pos: &mut usize) -> Result<Term, TreeError> {
    let v = tokens.get(*pos).ok_or(TreeError::MissingValue(*pos))?;
    if is_structural(v) || v.as_str().chars().count() != 1 {
        return Err(TreeError::MissingValue(*pos));
    }
    *pos += 1;
    let left = parse_branch(tokens, pos)?;
    let right = parse_branch(tokens, pos)?;
    Ok(Term::node(names::BRANCH, vec![v.clone()], vec![left, right]))
}

fn parse_branch(tokens: &[Token], pos: &mut usize) -> Result<Term, TreeError> {
    match tokens.get(*pos).map(Token::as_str) {
        Some(LEAF_TOKEN) => {
            *pos += 1;
            Ok(leaf())
        }
        Some(OPEN) => {
            let open_at = *pos;
            *pos += 1;
            let node = parse_node(tokens, pos).map_err(|e| match e {
                TreeError::MissingValue(p) | TreeError::MissingBranch(p) if p >= tokens.len() => {
                    TreeError::Unbalanced(open_at)
                }
                other => other,
            })?;
            match tokens.get(*pos).map(Token::as_str) {
                Some(CLOSE) => {
                    *pos += 1;
                    Ok(node)
                }
                _ => Err(TreeError::Unbalanced(open_at)),
            }
        }
        Some(CLOSE) => Err(TreeError::Unbalanced(*pos)),
        _ => Err(TreeError::MissingBranch(*pos)),
    }
}

/// Every tree with depth at most `max_depth` over `alphabet`, including the
/// bare Leaf.
pub fn enumerate_trees(max_depth: usize, alphabet: &[char]) -> Vec<Term> {
    let mut level = vec![leaf()];
    for _ in 0..max_depth {
        let mut next = vec![leaf()];
        for &v in alphabet {
            for l in &level {
                for r in &level {
                    next.push(branch(v, l.clone(), r.clone()));
                }
            }
        }
        level = next;
    }
    level
}

/// Number of distinct trees whose depth lies exactly in `depths`.
pub fn count_trees(depths: std::ops::RangeInclusive<usize>, alphabet_len: usize) -> BigUint {
    // at_most[d] = 1 + A * at_most[d-1]^2
    let mut at_most = vec![BigUint::from(1u32)];
    for d in 1..=*depths.end() {
        let prev = &at_most[d - 1];
        at_most.push(BigUint::from(1u32) + BigUint::from(alphabet_len) * prev * prev);
    }
    let mut total = BigUint::from(0u32);
    for d in depths {
        let below = if d == 0 {
            BigUint::from(0u32)
        } else {
            at_most[d - 1].clone()
        };
        total += &at_most[d] - below;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{join, tokens};

    #[test]
    fn cat_tree_serializes() {
        let s = tree_serialize(&cat_tree()).unwrap();
        assert_eq!(s.text(), "a ( c LEAF LEAF ) ( t LEAF LEAF )");
        assert_eq!(s.order, Order::TreeAppendix);
    }

    #[test]
    fn single_node() {
        assert_eq!(tree_serialize(&single('x')).unwrap().text(), "x LEAF LEAF");
    }

    #[test]
    fn bare_leaf_has_no_form() {
        assert_eq!(tree_serialize(&leaf()), Err(TreeError::BareLeaf));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(tree_parse(&tokens("a ( b LEAF")), Err(TreeError::Unbalanced(1)));
        assert!(matches!(
            tree_parse(&tokens("a LEAF")),
            Err(TreeError::MissingBranch(2))
        ));
        assert!(matches!(
            tree_parse(&tokens("a LEAF LEAF )")),
            Err(TreeError::Unbalanced(3))
        ));
        assert!(matches!(
            tree_parse(&tokens("a LEAF LEAF b")),
            Err(TreeError::Trailing(1))
        ));
        assert!(matches!(tree_parse(&tokens("LEAF")), Err(TreeError::MissingValue(0))));
        assert!(matches!(tree_parse(&tokens("")), Err(TreeError::MissingValue(0))));
    }

    #[test]
    fn parse_cat() {
        let t = tree_parse(&tokens("a ( c LEAF LEAF ) ( t LEAF LEAF )")).unwrap();
        assert_eq!(t, cat_tree());
        assert_eq!(depth(&t), 2);
        assert_eq!(node_count(&t), 3);
    }

    #[test]
    fn enumeration_matches_count() {
        let abc = ['a', 'b', 'c'];
        for d in 0..=3 {
            let all = enumerate_trees(d, &abc);
            assert_eq!(BigUint::from(all.len()), count_trees(0..=d, 3));
            let exact = all.iter().filter(|t| depth(t) == d).count();
            assert_eq!(BigUint::from(exact), count_trees(d..=d, 3));
        }
    }

    #[test]
    fn serialized_forms_are_distinct() {
        let all = enumerate_trees(3, &['a', 'b']);
        let mut seen = std::collections::HashSet::new();
        for t in all.iter().filter(|t| !is_leaf(t)) {
            assert!(seen.insert(join(&tree_serialize(t).unwrap().tokens)));
        }
    }
}
