//! The two single-step channel combining transforms.
//!
//! Both transforms are evaluated on the half alphabet. For input pairs `i`
//! and `j` the `2L x 2L` joint outputs of the minus transform collapse into one
//! pair `(a_i a_j + b_i b_j, a_i b_j + b_i a_j)`; the plus transform produces
//! `(a_i a_j, b_i b_j)` and `(a_i b_j, b_i a_j)`. Conjugate outputs with
//! identical likelihood ratios are added up front, so only the unordered
//! `i <= j` combinations are materialized.

use crate::channel::{BmsChannel, SymbolPair};
use crate::error::Result;
use crate::real::Real;

/// Which of the two transforms to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    /// `W ⊞ W`, selected by a zero index bit.
    Minus,
    /// `W ⊛ W`, selected by a one index bit.
    Plus,
}

impl TransformKind {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            TransformKind::Plus
        } else {
            TransformKind::Minus
        }
    }

    pub fn apply<T: Real>(self, ch: &BmsChannel<T>) -> Result<BmsChannel<T>> {
        match self {
            TransformKind::Minus => transform_minus(ch),
            TransformKind::Plus => transform_plus(ch),
        }
    }
}

/// `(W ⊞ W)(y1, y2 | u1) = ½ Σ_{u2} W(y1 | u1 ⊕ u2) W(y2 | u2)`.
pub fn transform_minus<T: Real>(ch: &BmsChannel<T>) -> Result<BmsChannel<T>> {
    let p = ch.pairs();
    let two = T::two();
    let mut out = Vec::with_capacity(p.len() * (p.len() + 1) / 2);
    for (i, x) in p.iter().enumerate() {
        out.push(SymbolPair { a: x.a * x.a + x.b * x.b, b: two * x.a * x.b });
        for y in &p[i + 1..] {
            // (a_i - b_i)(a_j - b_j) >= 0, so the first entry is the larger one
            out.push(SymbolPair {
                a: two * (x.a * y.a + x.b * y.b),
                b: two * (x.a * y.b + x.b * y.a),
            });
        }
    }
    BmsChannel::canonicalize(out)
}

/// `(W ⊛ W)(y1, y2, u1 | u2) = ½ W(y1 | u1 ⊕ u2) W(y2 | u2)`.
pub fn transform_plus<T: Real>(ch: &BmsChannel<T>) -> Result<BmsChannel<T>> {
    let p = ch.pairs();
    let two = T::two();
    let mut out = Vec::with_capacity(p.len() * (p.len() + 1));
    for (i, x) in p.iter().enumerate() {
        out.push(SymbolPair { a: x.a * x.a, b: x.b * x.b });
        out.push(SymbolPair { a: x.a * x.b, b: x.a * x.b });
        for y in &p[i + 1..] {
            out.push(SymbolPair { a: two * x.a * y.a, b: two * x.b * y.b });
            out.push(SymbolPair::new(two * x.a * y.b, two * x.b * y.a));
        }
    }
    BmsChannel::canonicalize(out)
}
