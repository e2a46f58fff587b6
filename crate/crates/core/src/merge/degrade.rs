//! Greedy degrading merge of adjacent conjugate pairs.

use super::{pair_budget, MergeWorkspace};
use crate::channel::{pair_capacity, BmsChannel, SymbolPair};
use crate::error::Result;
use crate::real::Real;

/// Two LR-adjacent pairs considered for merging: `(a, b)` on the left and
/// `(a_next, b_next)` on the right. The merge loss lives in the workspace key.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeDatum<T> {
    pub a: T,
    pub b: T,
    pub a_next: T,
    pub b_next: T,
}

impl<T: Real> MergeDatum<T> {
    pub fn delta_i(&self) -> T {
        merge_loss(
            SymbolPair { a: self.a, b: self.b },
            SymbolPair { a: self.a_next, b: self.b_next },
        )
    }
}

/// Capacity lost when two pairs are replaced by their componentwise sum.
#[inline]
pub fn merge_loss<T: Real>(x: SymbolPair<T>, y: SymbolPair<T>) -> T {
    pair_capacity(x.a, x.b) + pair_capacity(y.a, y.b) - pair_capacity(x.a + y.a, x.b + y.b)
}

/// Reduces `ch` to at most `mu / 2` pairs by repeatedly merging the adjacent
/// pairs whose merge loses the least capacity. The result is degraded with
/// respect to `ch`.
pub fn degrading_merge<T: Real>(ch: &BmsChannel<T>, mu: usize) -> Result<BmsChannel<T>> {
    let nu = pair_budget(mu)?;
    let p = ch.pairs();
    if p.len() <= nu {
        return Ok(ch.clone());
    }
    let mut ws = MergeWorkspace::with_capacity(p.len() - 1);
    for w in p.windows(2) {
        let d = MergeDatum { a: w[0].a, b: w[0].b, a_next: w[1].a, b_next: w[1].b };
        ws.insert_rightmost(d, Some(d.delta_i()));
    }
    let mut ell = p.len();
    let mut last = None;
    while ell > nu {
        let id = ws.get_min().expect("heap holds a datum while pairs exceed the budget");
        let d = *ws.payload(id);
        let (am, bm) = (d.a + d.a_next, d.b + d.b_next);
        let (left, right) = (ws.left(id), ws.right(id));
        ws.remove(id);
        ell -= 1;
        if let Some(l) = left {
            let x = ws.payload_mut(l);
            x.a_next = am;
            x.b_next = bm;
            let k = x.delta_i();
            ws.value_updated(l, Some(k));
        }
        if let Some(r) = right {
            let x = ws.payload_mut(r);
            x.a = am;
            x.b = bm;
            let k = x.delta_i();
            ws.value_updated(r, Some(k));
        }
        last = Some(SymbolPair { a: am, b: bm });
        #[cfg(test)]
        ws.check_invariants().expect("merge workspace invariants");
    }
    let mut out = Vec::with_capacity(nu);
    match ws.head() {
        Some(h) => {
            let d = ws.payload(h);
            out.push(SymbolPair { a: d.a, b: d.b });
            out.extend(ws.iter().map(|id| {
                let d = ws.payload(id);
                SymbolPair { a: d.a_next, b: d.b_next }
            }));
        }
        None => out.extend(last),
    }
    BmsChannel::canonicalize(out)
}
