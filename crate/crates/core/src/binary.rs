//! Positive binary numbers (`bin_pos`) and unary naturals (`peano`).
//!
//! `01` is one, `X0 b` is `2·b`, `X1 b` is `2·b + 1`. The constructor order
//! puts the least significant bit first and `01` (the leading one bit) last.

use num_bigint::BigUint;

use crate::term::{linearize, names, reorder, Order, Term, TermError, Token, TokenSeq};

/// Encode `n ≥ 1` as a `bin_pos` term.
pub fn bin_encode(n: u64) -> Result<Term, TermError> {
    if n == 0 {
        return Err(TermError::Zero);
    }
    let bits = bit_length(n);
    let mut t = Term::leaf(names::B01);
    for i in (0..bits - 1).rev() {
        let ctor = if n >> i & 1 == 1 { names::X1 } else { names::X0 };
        t = t.wrap(ctor);
    }
    Ok(t)
}

pub fn bin_encode_big(n: &BigUint) -> Result<Term, TermError> {
    let bits = n.bits();
    if bits == 0 {
        return Err(TermError::Zero);
    }
    let mut t = Term::leaf(names::B01);
    for i in (0..bits - 1).rev() {
        let ctor = if n.bit(i) { names::X1 } else { names::X0 };
        t = t.wrap(ctor);
    }
    Ok(t)
}

/// Numeric value of a `bin_pos` term.
pub fn bin_value(t: &Term) -> Result<BigUint, TermError> {
    // Walk to the base first; the chain is stored outermost-first.
    let mut chain = Vec::new();
    let mut cur = t;
    loop {
        match cur.ctor.as_str() {
            names::B01 if cur.children.is_empty() => break,
            names::X0 | names::X1 if cur.children.len() == 1 => {
                chain.push(cur.ctor.as_str() == names::X1);
                cur = &cur.children[0];
            }
            names::B01 | names::X0 | names::X1 => return Err(TermError::ArityMismatch(cur.ctor.clone())),
            _ => return Err(TermError::UnknownToken(cur.ctor.clone())),
        }
    }
    let mut v = BigUint::from(1u32);
    for one in chain.into_iter().rev() {
        v <<= 1;
        if one {
            v += 1u32;
        }
    }
    Ok(v)
}

/// [`bin_value`] for terms that fit in 64 bits.
pub fn bin_value_u64(t: &Term) -> Result<u64, TermError> {
    let v = bin_value(t)?;
    u64::try_from(v).map_err(|_| TermError::ArityMismatch(Token::from("overflow")))
}

pub fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Tokens for `n` in the requested surface order.
pub fn bin_tokens(n: u64, order: Order) -> Result<Vec<Token>, TermError> {
    let seq = linearize(&bin_encode(n)?);
    Ok(reorder(&seq, order)?.tokens)
}

/// Number of `X1` constructors wrapping the term before the first `X0` or `01`.
///
/// Equivalently: the count of trailing one bits of `n` that lie strictly below
/// its most significant bit. This is the number of recursive calls `s` makes.
pub fn leading_x1(t: &Term) -> usize {
    let mut k = 0;
    let mut cur = t;
    while cur.is(names::X1) && cur.children.len() == 1 {
        k += 1;
        cur = &cur.children[0];
    }
    k
}

/// Trailing one bits of `n` below its most significant bit.
///
/// The most significant bit is the `01` base constructor, not an `X1`, so an
/// all-ones value of bit length `L` has `L - 1` such bits.
pub fn trailing_ones_below_msb(n: u64) -> u32 {
    assert!(n >= 1);
    let below = bit_length(n) - 1;
    n.trailing_ones().min(below)
}

pub fn peano(n: u64) -> Result<Term, TermError> {
    if n == 0 {
        return Err(TermError::Zero);
    }
    let mut t = Term::leaf(names::ONE);
    for _ in 1..n {
        t = t.wrap(names::SUCC);
    }
    Ok(t)
}

pub fn peano_value(t: &Term) -> Result<u64, TermError> {
    let mut v = 1;
    let mut cur = t;
    while cur.is(names::SUCC) {
        v += 1;
        cur = cur
            .children
            .first()
            .ok_or_else(|| TermError::ArityMismatch(cur.ctor.clone()))?;
    }
    if cur.is(names::ONE) {
        Ok(v)
    } else {
        Err(TermError::UnknownToken(cur.ctor.clone()))
    }
}

/// Parse tokens in `order` into a `bin_pos` term.
pub fn bin_parse(tokens: &[Token], order: Order) -> Result<Term, TermError> {
    let seq = TokenSeq::new(tokens.to_vec(), order);
    let rev = reorder(&seq, Order::ConstructorReverse)?;
    crate::term::delinearize(&rev, &crate::term::bin_pos_def())
}
