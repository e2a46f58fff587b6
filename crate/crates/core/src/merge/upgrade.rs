//! Upgrading merge: mass of a removed pair is pushed onto LR neighbors so the
//! result is upgraded with respect to the input.

use super::{pair_budget, MergeWorkspace};
use crate::channel::{BmsChannel, SymbolPair};
use crate::error::{Error, Result};
use crate::real::Real;
use std::cmp::Ordering;

/// Default LR closeness threshold of the preliminary pass.
pub const DEFAULT_EPS: f64 = 1e-3;

/// Moves the whole mass of `lower` onto the LR of `upper`, returning what
/// `upper` gains.
#[inline]
fn promote<T: Real>(lower: SymbolPair<T>, upper: SymbolPair<T>) -> SymbolPair<T> {
    let s = lower.mass();
    let beta = s * (upper.b / upper.mass());
    SymbolPair { a: s - beta, b: beta }
}

/// Splits the middle pair `m` onto the LRs of `l` and `r`, returning the
/// masses added to each side. `None` unless `lr(l) < lr(m) < lr(r)` holds
/// strictly.
///
/// Works on the ratios themselves: cross products of pair masses underflow
/// for the nearly noiseless channels deep in the polarization tree.
pub fn triple_split<T: Real>(
    l: SymbolPair<T>,
    m: SymbolPair<T>,
    r: SymbolPair<T>,
) -> Option<(SymbolPair<T>, SymbolPair<T>)> {
    if l.cmp_lr(&m) != Ordering::Less || m.cmp_lr(&r) != Ordering::Less {
        return None;
    }
    let zero = T::zero();
    let (l1, l3) = (l.lr(), r.lr());
    if l3.is_infinite() {
        // right neighbor has infinite LR: it absorbs only `a` mass
        let a1 = (l1 * m.b).min(m.a);
        return Some((SymbolPair { a: a1, b: m.b }, SymbolPair { a: m.a - a1, b: zero }));
    }
    let d = l3 - l1;
    if !(d > zero) || !d.is_finite() {
        return None;
    }
    // both shares come straight from the ratios; a remainder would cancel
    // when one share is many orders of magnitude below the other
    let b1 = ((l3 * m.b - m.a) / d).max(zero).min(m.b);
    let b3 = ((m.a - l1 * m.b) / d).max(zero).min(m.b);
    let a1 = (l1 * b1).min(m.a);
    let a3 = (l3 * b3).min(m.a);
    Some((SymbolPair { a: a1, b: b1 }, SymbolPair { a: a3, b: b3 }))
}

/// Capacity increase of splitting `m` onto its neighbors.
#[inline]
fn triple_gain<T: Real>(
    l: SymbolPair<T>,
    m: SymbolPair<T>,
    r: SymbolPair<T>,
    split: (SymbolPair<T>, SymbolPair<T>),
) -> T {
    let (left, right) = split;
    left.mass() * l.unit_capacity() + right.mass() * r.unit_capacity() - m.capacity()
}

/// Capacity increase of promoting `m` onto the LR of `r`.
#[inline]
fn pairwise_gain<T: Real>(m: SymbolPair<T>, r: SymbolPair<T>) -> T {
    m.mass() * r.unit_capacity() - m.capacity()
}

/// Moves pair `i` onto the LR of pair `i + 1`. The result is upgraded with
/// respect to `ch`.
pub fn upgrade_step_pairwise<T: Real>(ch: &BmsChannel<T>, i: usize) -> Result<BmsChannel<T>> {
    let p = ch.pairs();
    if i + 1 >= p.len() {
        return Err(Error::arg(format!("pair index {i} has no right neighbor in {} pairs", p.len())));
    }
    let gain = promote(p[i], p[i + 1]);
    let mut out = p.to_vec();
    out[i + 1].a = out[i + 1].a + gain.a;
    out[i + 1].b = out[i + 1].b + gain.b;
    out.remove(i);
    BmsChannel::canonicalize(out)
}

/// Splits pair `i + 1` onto pairs `i` and `i + 2`, keeping their LRs. The
/// result is upgraded with respect to `ch`.
pub fn upgrade_step_triple<T: Real>(ch: &BmsChannel<T>, i: usize) -> Result<BmsChannel<T>> {
    let p = ch.pairs();
    if i + 2 >= p.len() {
        return Err(Error::arg(format!("pair index {i} needs two right neighbors in {} pairs", p.len())));
    }
    let (left, right) = triple_split(p[i], p[i + 1], p[i + 2]).ok_or_else(|| {
        Error::Precondition(format!("pairs {i}..{} are not strictly LR increasing", i + 2))
    })?;
    let mut out = p.to_vec();
    out[i].a = out[i].a + left.a;
    out[i].b = out[i].b + left.b;
    out[i + 2].a = out[i + 2].a + right.a;
    out[i + 2].b = out[i + 2].b + right.b;
    out.remove(i + 1);
    BmsChannel::canonicalize(out)
}

/// Closed-form capacity increase `Δ[λ1; λ2, π2; λ3]` of splitting a pair of
/// mass `pi2` and ratio `l2` onto ratios `l1` and `l3`.
pub fn delta_capacity_closed_form<T: Real>(l1: T, l2: T, pi2: T, l3: T) -> Result<T> {
    let one = T::one();
    if !(one <= l1 && l1 <= l2 && l2 <= l3) || l2.is_infinite() {
        return Err(Error::arg(format!(
            "ratios must satisfy 1 <= l1 <= l2 <= l3 with l2 finite, got {l1}, {l2}, {l3}"
        )));
    }
    if !(pi2 > T::zero()) || !pi2.is_finite() {
        return Err(Error::arg(format!("mass must be positive, got {pi2}")));
    }
    if l1 == l3 {
        return Ok(T::zero());
    }
    let t = |x: T| x * (one + one / x).log2() + (one + x).log2();
    let scale = pi2 / (l2 + one);
    if l3.is_infinite() {
        return Ok(scale * (t(l2) - t(l1)));
    }
    Ok(scale / (l1 - l3) * ((l3 - l2) * t(l1) + (l2 - l1) * t(l3) + (l1 - l3) * t(l2)))
}

/// Reduces `ch` to at most `mu / 2` pairs, producing a channel upgraded with
/// respect to `ch`.
///
/// A preliminary left-to-right pass promotes every pair whose LR is within a
/// factor `1 + eps` of its right neighbor. The main loop then removes the
/// interior pair whose split onto its neighbors costs the least capacity.
/// When only two pairs remain and one is required, the lower one is promoted.
pub fn upgrading_merge<T: Real>(ch: &BmsChannel<T>, mu: usize, eps: T) -> Result<BmsChannel<T>> {
    let nu = pair_budget(mu)?;
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(Error::arg(format!("eps must be positive, got {eps}")));
    }
    if ch.len() <= nu {
        return Ok(ch.clone());
    }
    let factor = T::one() + eps;
    let mut stack: Vec<SymbolPair<T>> = Vec::with_capacity(ch.len());
    for &p in ch.pairs() {
        let mut cur = p;
        if let Some(&top) = stack.last() {
            if lr_within(top, cur, factor) {
                stack.pop();
                let g = promote(top, cur);
                cur.a = cur.a + g.a;
                cur.b = cur.b + g.b;
            }
        }
        stack.push(cur);
    }
    if stack.len() <= nu {
        return BmsChannel::canonicalize(stack);
    }

    let mut ws: MergeWorkspace<T, SymbolPair<T>> = MergeWorkspace::with_capacity(stack.len());
    let n = stack.len();
    for (i, &p) in stack.iter().enumerate() {
        let key = (i > 0 && i + 1 < n).then(|| candidate_gain(stack[i - 1], p, stack[i + 1]));
        ws.insert_rightmost(p, key);
    }
    while ws.len() > nu {
        match ws.get_min() {
            Some(id) => {
                let l = ws.left(id).expect("queued node has a left neighbor");
                let r = ws.right(id).expect("queued node has a right neighbor");
                let (pl, pm, pr) = (*ws.payload(l), *ws.payload(id), *ws.payload(r));
                match triple_split(pl, pm, pr) {
                    Some((gl, gr)) => {
                        add(ws.payload_mut(l), gl);
                        add(ws.payload_mut(r), gr);
                    }
                    None => add(ws.payload_mut(r), promote(pm, pr)),
                }
                ws.remove(id);
                refresh(&mut ws, l);
                refresh(&mut ws, r);
            }
            None => {
                let h = ws.head().expect("workspace not empty");
                let r = ws.right(h).expect("two pairs remain");
                let (pm, pr) = (*ws.payload(h), *ws.payload(r));
                add(ws.payload_mut(r), promote(pm, pr));
                ws.remove(h);
            }
        }
        #[cfg(test)]
        ws.check_invariants().expect("merge workspace invariants");
    }
    let out: Vec<_> = ws.iter().map(|id| *ws.payload(id)).collect();
    BmsChannel::canonicalize(out)
}

/// `lr(hi) < factor * lr(lo)`, on cross products unless they leave the
/// normal range.
#[inline]
fn lr_within<T: Real>(lo: SymbolPair<T>, hi: SymbolPair<T>, factor: T) -> bool {
    let (lhs, rhs) = (hi.a * lo.b, factor * lo.a * hi.b);
    if lhs.is_normal() && rhs.is_normal() {
        lhs < rhs
    } else {
        hi.lr() < factor * lo.lr()
    }
}

#[inline]
fn add<T: Real>(x: &mut SymbolPair<T>, g: SymbolPair<T>) {
    x.a = x.a + g.a;
    x.b = x.b + g.b;
}

#[inline]
fn candidate_gain<T: Real>(l: SymbolPair<T>, m: SymbolPair<T>, r: SymbolPair<T>) -> T {
    match triple_split(l, m, r) {
        Some(split) => triple_gain(l, m, r, split),
        None => pairwise_gain(m, r),
    }
}

fn refresh<T: Real>(ws: &mut MergeWorkspace<T, SymbolPair<T>>, id: usize) {
    let key = match (ws.left(id), ws.right(id)) {
        (Some(l), Some(r)) => Some(candidate_gain(*ws.payload(l), *ws.payload(id), *ws.payload(r))),
        _ => None,
    };
    ws.value_updated(id, key);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: f64, b: f64) -> SymbolPair<f64> {
        SymbolPair { a, b }
    }

    #[test]
    fn pairwise_into_infinite_ratio() {
        let ch = BmsChannel::<f64>::from_half_pairs(&[(0.1, 0.05), (0.85, 0.0)]).unwrap();
        let q = upgrade_step_pairwise(&ch, 0).unwrap();
        assert_eq!(q.len(), 1);
        assert!((q.pairs()[0].a - 1.0).abs() < 1e-15);
        assert_eq!(q.pairs()[0].b, 0.0);
        let g = promote(sp(0.1, 0.05), sp(0.85, 0.0));
        assert!((g.a - 0.15).abs() < 1e-15 && g.b == 0.0);
    }

    #[test]
    fn pairwise_into_finite_ratio() {
        let g = promote(sp(0.12, 0.04), sp(0.45, 0.05));
        assert!((g.a - 0.144).abs() < 1e-15);
        assert!((g.b - 0.016).abs() < 1e-15);
        assert!((g.a / g.b - 9.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_equal_ratio_is_lossless() {
        let ch = BmsChannel::from_canonical_unchecked(vec![sp(0.2, 0.1), sp(0.4, 0.2), sp(0.1, 0.0)]);
        let q = upgrade_step_pairwise(&ch, 0).unwrap();
        assert!((q.capacity() - ch.capacity()).abs() < 1e-12);
        assert!(upgrade_step_pairwise(&ch, 2).is_err());
    }

    #[test]
    fn triple_split_finite() {
        let (l, r) = triple_split(sp(0.1, 0.1), sp(0.2, 0.1), sp(0.4, 0.1)).unwrap();
        assert!((l.a - 0.2 / 3.0).abs() < 1e-15 && (l.b - 0.2 / 3.0).abs() < 1e-15);
        assert!((r.a - 0.4 / 3.0).abs() < 1e-15 && (r.b - 0.1 / 3.0).abs() < 1e-15);
        assert!((l.a + r.a - 0.2).abs() < 1e-16 && (l.b + r.b - 0.1).abs() < 1e-16);
    }

    #[test]
    fn triple_split_infinite_right() {
        let (l, r) = triple_split(sp(0.1, 0.1), sp(0.2, 0.1), sp(0.3, 0.0)).unwrap();
        assert!((l.a - 0.1).abs() < 1e-15 && l.b == 0.1);
        assert!((r.a - 0.1).abs() < 1e-15 && r.b == 0.0);
    }

    #[test]
    fn triple_split_requires_strict_order() {
        assert!(triple_split(sp(0.2, 0.1), sp(0.4, 0.2), sp(0.3, 0.0)).is_none());
        let ch = BmsChannel::from_canonical_unchecked(vec![sp(0.2, 0.1), sp(0.4, 0.2), sp(0.3, 0.0)]);
        assert!(matches!(upgrade_step_triple(&ch, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn triple_split_degenerate_goes_left() {
        let (l, r) = triple_split(sp(0.2, 0.1), sp(0.2 + 1e-12, 0.1), sp(0.3, 0.0)).unwrap();
        assert!(r.a < 1e-11 && r.b == 0.0);
        assert!((l.b - 0.1).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_channel_difference() {
        let (l1, l2, pi2, l3) = (1.0, 2.0, 0.3, 4.0);
        let ch = BmsChannel::<f64>::from_half_pairs(&[
            (0.15, 0.15),
            (pi2 * l2 / (l2 + 1.0), pi2 / (l2 + 1.0)),
            (0.4 * l3 / (l3 + 1.0), 0.4 / (l3 + 1.0)),
        ])
        .unwrap();
        let q = upgrade_step_triple(&ch, 0).unwrap();
        let direct = q.capacity() - ch.capacity();
        let closed = delta_capacity_closed_form(l1, l2, pi2, l3).unwrap();
        assert!((direct - closed).abs() < 1e-10, "{direct} vs {closed}");
        assert!(closed > 0.0);
    }

    #[test]
    fn closed_form_infinite_branch() {
        let ch = BmsChannel::<f64>::from_half_pairs(&[(0.05, 0.05), (0.2, 0.1), (0.6, 0.0)]).unwrap();
        let q = upgrade_step_triple(&ch, 0).unwrap();
        let closed = delta_capacity_closed_form(1.0, 2.0, 0.3, f64::INFINITY).unwrap();
        assert!((q.capacity() - ch.capacity() - closed).abs() < 1e-12);
    }

    #[test]
    fn closed_form_edge_cases() {
        assert_eq!(delta_capacity_closed_form(2.0, 2.0, 0.3, 2.0).unwrap(), 0.0);
        assert!(delta_capacity_closed_form(2.0f64, 2.0, 0.3, 5.0).unwrap().abs() < 1e-15);
        assert!(delta_capacity_closed_form(3.0, 2.0, 0.3, 5.0).is_err());
        assert!(delta_capacity_closed_form(0.5, 2.0, 0.3, 5.0).is_err());
        assert!(delta_capacity_closed_form(1.0, 2.0, 0.0, 5.0).is_err());
        let base = delta_capacity_closed_form(1.5, 2.0, 0.3, 4.0).unwrap();
        let wider = delta_capacity_closed_form(1.1, 2.0, 0.3, 9.0).unwrap();
        assert!(wider >= base);
    }

    #[test]
    fn bec_upgrades() {
        let ch = BmsChannel::<f64>::bec(0.5).unwrap();
        assert_eq!(upgrading_merge(&ch, 4, 1e-3).unwrap(), ch);
        let q = upgrading_merge(&ch, 2, 1e-3).unwrap();
        assert_eq!(q.len(), 1);
        assert!(q.capacity() >= 0.5);
        assert!(upgrading_merge(&ch, 1, 1e-3).is_err());
        assert!(upgrading_merge(&ch, 2, 0.0).is_err());
    }
}
