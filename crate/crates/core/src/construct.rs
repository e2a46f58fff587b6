//! Bit-channel bounds and information-set selection.
//!
//! Bit channel `i` of a length `n = 2^m` code is reached by applying, for each
//! bit of `i` from the most significant down, the minus transform (bit 0) or
//! the plus transform (bit 1). Following that path while merging after every
//! transform yields a degraded channel, or an upgraded one when the merge
//! upgrades. The degrading path also tracks a Bhattacharyya bound, which can
//! only tighten the error-probability upper bound.
//!
//! [`sweep_all`] evaluates every index at once by walking the binary tree of
//! intermediate channels depth first, so each internal channel is built once
//! and only one root-to-leaf path per worker is alive at a time.

use crate::channel::BmsChannel;
use crate::error::{Error, Result};
use crate::merge::{degrading_merge, pair_budget, upgrading_merge};
use crate::polarize::TransformKind;
use crate::quantize::Sandwich;
use crate::real::Real;
use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

/// Largest supported `m`.
pub const MAX_LOG_LENGTH: u32 = 30;

/// A bit-channel index together with the code length `2^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitIndex {
    i: usize,
    m: u32,
}

impl BitIndex {
    pub fn new(i: usize, m: u32) -> Result<Self> {
        if m > MAX_LOG_LENGTH {
            return Err(Error::arg(format!("log2 of the code length must be <= {MAX_LOG_LENGTH}, got {m}")));
        }
        if i >= 1usize << m {
            return Err(Error::arg(format!("index {i} out of range for n = {}", 1usize << m)));
        }
        Ok(BitIndex { i, m })
    }

    pub fn index(&self) -> usize {
        self.i
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    /// Bits `b_1, ..., b_m`, most significant first.
    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.m).rev().map(move |k| (self.i >> k) & 1 == 1)
    }

    /// Transforms in the order they are applied.
    pub fn path(&self) -> impl Iterator<Item = TransformKind> + '_ {
        self.bits().map(TransformKind::from_bit)
    }
}

/// `log2(n)` for a power of two `n >= 1`.
pub fn log2_length(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::arg(format!("code length must be a power of two, got {n}")));
    }
    let m = n.trailing_zeros();
    if m > MAX_LOG_LENGTH {
        return Err(Error::arg(format!("code length {n} is too large")));
    }
    Ok(m)
}

/// Bounds on one bit channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelBounds<T> {
    pub index: usize,
    /// Upper bound on the error probability with Bhattacharyya tracking.
    pub pe_upper: T,
    /// Error probability of the degraded channel alone.
    pub pe_degraded: T,
    /// Error probability of the upgraded channel.
    pub pe_lower: T,
    /// Capacity of the degraded channel.
    pub i_lower: T,
    /// Capacity of the upgraded channel.
    pub i_upper: T,
    /// Upper bound on the Bhattacharyya parameter.
    pub z_upper: T,
}

impl<T: Real> ChannelBounds<T> {
    /// The trivial bounds that hold for every bit channel.
    pub fn trivial(index: usize) -> Self {
        ChannelBounds {
            index,
            pe_upper: T::half(),
            pe_degraded: T::half(),
            pe_lower: T::zero(),
            i_lower: T::zero(),
            i_upper: T::one(),
            z_upper: T::one(),
        }
    }
}

/// Which trees [`sweep_all`] evaluates. The Bhattacharyya-tracked upper bound
/// rides on the degrading tree, so `pe_upper` implies it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modes {
    pub degrade: bool,
    pub upgrade: bool,
    pub pe_upper: bool,
}

impl Modes {
    pub const ALL: Modes = Modes { degrade: true, upgrade: true, pe_upper: true };
    pub const UPPER: Modes = Modes { degrade: true, upgrade: false, pe_upper: true };
    pub const LOWER: Modes = Modes { degrade: false, upgrade: true, pe_upper: false };

    fn degrading_tree(&self) -> bool {
        self.degrade || self.pe_upper
    }
}

/// Number of transform-and-merge steps performed per tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub degrade_steps: usize,
    pub upgrade_steps: usize,
}

/// Output of [`sweep_all`], indexed by bit-channel index.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep<T> {
    pub mu: usize,
    pub bounds: Vec<ChannelBounds<T>>,
    pub stats: SweepStats,
}

/// A channel degraded with respect to bit channel `idx`.
pub fn degrade_bit_channel<T: Real>(
    w: &BmsChannel<T>,
    mu: usize,
    idx: BitIndex,
) -> Result<BmsChannel<T>> {
    let mut q = degrading_merge(w, mu)?;
    for kind in idx.path() {
        q = degrading_merge(&kind.apply(&q)?, mu)?;
    }
    Ok(q)
}

/// A channel upgraded with respect to bit channel `idx`.
pub fn upgrade_bit_channel<T: Real>(
    w: &BmsChannel<T>,
    mu: usize,
    eps: T,
    idx: BitIndex,
) -> Result<BmsChannel<T>> {
    let mut q = upgrading_merge(w, mu, eps)?;
    for kind in idx.path() {
        q = upgrading_merge(&kind.apply(&q)?, mu, eps)?;
    }
    Ok(q)
}

#[inline]
fn next_z<T: Real>(kind: TransformKind, z: T, w: &BmsChannel<T>) -> T {
    match kind {
        TransformKind::Minus => w.bhattacharyya().min(T::two() * z - z * z),
        TransformKind::Plus => z * z,
    }
}

/// An upper bound on the error probability of bit channel `idx`
/// that combines the degraded channel with a tracked Bhattacharyya bound.
pub fn pe_upper_bound<T: Real>(w: &BmsChannel<T>, mu: usize, idx: BitIndex) -> Result<T> {
    let mut z = w.bhattacharyya();
    let mut q = degrading_merge(w, mu)?;
    for kind in idx.path() {
        let next = kind.apply(&q)?;
        z = next_z(kind, z, &next);
        q = degrading_merge(&next, mu)?;
    }
    Ok(q.error_probability().min(z))
}

/// Remaining tree levels below which children are evaluated sequentially.
const PARALLEL_MIN_LEVELS: usize = 2;

fn join<A, B>(levels: usize, a: A, b: B) -> Result<()>
where
    A: FnOnce() -> Result<()> + Send,
    B: FnOnce() -> Result<()> + Send,
{
    if levels >= PARALLEL_MIN_LEVELS {
        let (ra, rb) = rayon::join(a, b);
        ra.and(rb)
    } else {
        a()?;
        b()
    }
}

struct Ctx<'a, T> {
    mu: usize,
    eps: T,
    steps: &'a AtomicUsize,
    track_degraded: bool,
}

fn degrade_tree<T: Real>(
    ctx: &Ctx<'_, T>,
    q: &BmsChannel<T>,
    z: T,
    out: &mut [ChannelBounds<T>],
) -> Result<()> {
    if let [leaf] = out {
        let pe = q.error_probability();
        leaf.pe_upper = pe.min(z);
        leaf.z_upper = z;
        if ctx.track_degraded {
            leaf.pe_degraded = pe;
            leaf.i_lower = q.capacity();
        }
        return Ok(());
    }
    let levels = out.len().trailing_zeros() as usize;
    let (lo, hi) = out.split_at_mut(out.len() / 2);
    let child = |kind: TransformKind, out: &mut [ChannelBounds<T>]| -> Result<()> {
        let (next, z) = {
            let w = kind.apply(q)?;
            let z = next_z(kind, z, &w);
            (degrading_merge(&w, ctx.mu)?, z)
        };
        ctx.steps.fetch_add(1, AtomicOrdering::Relaxed);
        degrade_tree(ctx, &next, z, out)
    };
    join(levels, || child(TransformKind::Minus, lo), || child(TransformKind::Plus, hi))
}

fn upgrade_tree<T: Real>(ctx: &Ctx<'_, T>, q: &BmsChannel<T>, out: &mut [ChannelBounds<T>]) -> Result<()> {
    if let [leaf] = out {
        leaf.pe_lower = q.error_probability();
        leaf.i_upper = q.capacity();
        return Ok(());
    }
    let levels = out.len().trailing_zeros() as usize;
    let (lo, hi) = out.split_at_mut(out.len() / 2);
    let child = |kind: TransformKind, out: &mut [ChannelBounds<T>]| -> Result<()> {
        let next = upgrading_merge(&kind.apply(q)?, ctx.mu, ctx.eps)?;
        ctx.steps.fetch_add(1, AtomicOrdering::Relaxed);
        upgrade_tree(ctx, &next, out)
    };
    join(levels, || child(TransformKind::Minus, lo), || child(TransformKind::Plus, hi))
}

/// Bounds for all `2^m` bit channels. The degraded side of `base` feeds the
/// degrading tree and the upgraded side feeds the upgrading tree. Fields of
/// modes that are not requested keep their trivial values.
///
/// Runs on the current rayon pool; results do not depend on the schedule.
pub fn sweep_all<T: Real>(
    base: &Sandwich<T>,
    mu: usize,
    eps: T,
    m: u32,
    modes: Modes,
) -> Result<Sweep<T>> {
    pair_budget(mu)?;
    if m > MAX_LOG_LENGTH {
        return Err(Error::arg(format!("log2 of the code length must be <= {MAX_LOG_LENGTH}, got {m}")));
    }
    if !(eps > T::zero()) {
        return Err(Error::arg(format!("eps must be positive, got {eps}")));
    }
    let n = 1usize << m;
    let mut bounds: Vec<ChannelBounds<T>> = (0..n).map(ChannelBounds::trivial).collect();
    let (dsteps, usteps) = (AtomicUsize::new(0), AtomicUsize::new(0));
    if modes.degrading_tree() {
        let ctx = Ctx { mu, eps, steps: &dsteps, track_degraded: modes.degrade };
        let root = degrading_merge(&base.degraded, mu)?;
        degrade_tree(&ctx, &root, base.degraded.bhattacharyya(), &mut bounds)?;
        if !modes.pe_upper {
            for b in &mut bounds {
                b.pe_upper = b.pe_degraded;
                b.z_upper = T::one();
            }
        }
    }
    if modes.upgrade {
        let ctx = Ctx { mu, eps, steps: &usteps, track_degraded: false };
        let root = upgrading_merge(&base.upgraded, mu, eps)?;
        upgrade_tree(&ctx, &root, &mut bounds)?;
    }
    Ok(Sweep {
        mu,
        bounds,
        stats: SweepStats {
            degrade_steps: dsteps.into_inner(),
            upgrade_steps: usteps.into_inner(),
        },
    })
}

/// How many indices to select.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    /// Exactly `k` indices.
    Dimension(usize),
    /// As many indices as possible while the summed upper bounds stay strictly
    /// below the block-error budget.
    Budget(f64),
}

/// A selected information set and its union bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionResult {
    pub n: usize,
    pub k: usize,
    /// Ascending.
    pub info_set: Vec<usize>,
    /// Ascending complement of `info_set`.
    pub frozen_set: Vec<usize>,
    /// Sum of `pe_upper` over the information set.
    pub union_bound: f64,
    /// Sum of `pe_lower` over the same set.
    pub lower_bound_sum: f64,
}

impl ConstructionResult {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

fn sorted_by<T: Real>(bounds: &[ChannelBounds<T>], key: impl Fn(&ChannelBounds<T>) -> T) -> Vec<usize> {
    let mut order: Vec<usize> = (0..bounds.len()).collect();
    order.sort_by(|&x, &y| {
        key(&bounds[x])
            .partial_cmp(&key(&bounds[y]))
            .unwrap_or(Ordering::Equal)
            .then(bounds[x].index.cmp(&bounds[y].index))
    });
    order
}

/// Picks the indices with the smallest upper bounds: the first `k`, or the
/// longest prefix whose summed upper bounds stay below the budget. Equal
/// bounds are taken in index order.
pub fn select_info_set<T: Real>(bounds: &[ChannelBounds<T>], target: Target) -> Result<ConstructionResult> {
    let n = bounds.len();
    if n == 0 {
        return Err(Error::arg("no bit-channel bounds to select from"));
    }
    let order = sorted_by(bounds, |b| b.pe_upper);
    let mut union_bound = 0.0;
    let k = match target {
        Target::Dimension(k) => {
            if k > n {
                return Err(Error::arg(format!("dimension {k} exceeds code length {n}")));
            }
            union_bound = order[..k].iter().map(|&j| bounds[j].pe_upper.f64()).sum();
            k
        }
        Target::Budget(budget) => {
            if !(budget > 0.0) {
                return Err(Error::arg(format!("block-error budget must be positive, got {budget}")));
            }
            let mut k = 0;
            for &j in &order {
                let next = union_bound + bounds[j].pe_upper.f64();
                if next < budget {
                    union_bound = next;
                    k += 1;
                } else {
                    break;
                }
            }
            k
        }
    };
    let lower_bound_sum = order[..k].iter().map(|&j| bounds[j].pe_lower.f64()).sum();
    let mut info_set: Vec<usize> = order[..k].iter().map(|&j| bounds[j].index).collect();
    info_set.sort_unstable();
    let mut frozen_set: Vec<usize> = order[k..].iter().map(|&j| bounds[j].index).collect();
    frozen_set.sort_unstable();
    Ok(ConstructionResult { n, k, info_set, frozen_set, union_bound, lower_bound_sum })
}

/// Sum of the `k` smallest values of one bound column.
pub fn smallest_sum<T: Real>(bounds: &[ChannelBounds<T>], k: usize, key: impl Fn(&ChannelBounds<T>) -> T) -> f64 {
    let mut v: Vec<f64> = bounds.iter().map(|b| key(b).f64()).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    v[..k.min(v.len())].iter().sum()
}

/// Bounds on `P(k) = min over |A| = k of Σ_{i∈A} P_e(W_i)` from each column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionBounds {
    /// From the degraded channels alone.
    pub degraded: f64,
    /// From the Bhattacharyya-tracked upper bounds.
    pub upper: f64,
    /// From the upgraded channels.
    pub lower: f64,
}

pub fn dimension_bounds<T: Real>(bounds: &[ChannelBounds<T>], k: usize) -> DimensionBounds {
    DimensionBounds {
        degraded: smallest_sum(bounds, k, |b| b.pe_degraded),
        upper: smallest_sum(bounds, k, |b| b.pe_upper),
        lower: smallest_sum(bounds, k, |b| b.pe_lower),
    }
}

/// Largest `k` whose `k` smallest lower bounds sum strictly below `budget`.
/// No information set of larger size can have union bound below the budget.
pub fn max_dimension_lower<T: Real>(bounds: &[ChannelBounds<T>], budget: f64) -> usize {
    let mut v: Vec<f64> = bounds.iter().map(|b| b.pe_lower.f64()).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    let mut sum = 0.0;
    let mut k = 0;
    for x in v {
        if sum + x < budget {
            sum += x;
            k += 1;
        } else {
            break;
        }
    }
    k
}

/// Split of bit channels against a per-channel error threshold.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    /// `pe_upper <= t`.
    pub good: Vec<usize>,
    /// `pe_lower > t`.
    pub bad: Vec<usize>,
    /// Neither.
    pub undecided: Vec<usize>,
}

pub fn classify<T: Real>(bounds: &[ChannelBounds<T>], threshold: f64) -> Classification {
    let mut c = Classification::default();
    for b in bounds {
        if b.pe_upper.f64() <= threshold {
            c.good.push(b.index);
        } else if b.pe_lower.f64() > threshold {
            c.bad.push(b.index);
        } else {
            c.undecided.push(b.index);
        }
    }
    c
}

/// Bit-reversal of the low `m` bits of `i`.
pub fn bit_reverse(i: usize, m: u32) -> usize {
    if m == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - m)
    }
}

/// `x = u B_n G^{⊗m}` over GF(2), in place.
pub fn polar_transform(u: &mut [u8]) {
    let n = u.len();
    debug_assert!(n.is_power_of_two());
    let m = n.trailing_zeros();
    for j in 0..n {
        let r = bit_reverse(j, m);
        if j < r {
            u.swap(j, r);
        }
    }
    let mut h = 1;
    while h < n {
        for block in u.chunks_mut(2 * h) {
            let (l, r) = block.split_at_mut(h);
            for (x, y) in l.iter_mut().zip(r.iter()) {
                *x ^= *y;
            }
        }
        h *= 2;
    }
}

/// Largest output alphabet [`exact_bit_channel`] will enumerate.
pub const EXACT_LIMIT: usize = 1 << 24;

/// Bit channel `idx` computed directly from its definition by summing over
/// all inputs and all output sequences. Only practical for tiny codes.
pub fn exact_bit_channel<T: Real>(w: &BmsChannel<T>, idx: BitIndex) -> Result<BmsChannel<T>> {
    let full = w.to_full_alphabet();
    let ny = full.len();
    let n = idx.n();
    let i = idx.index();
    let outputs = (ny as f64).powi(n as i32) * 2f64.powi(i as i32);
    let work = outputs * 2f64.powi((n - i) as i32) * n as f64;
    if outputs > EXACT_LIMIT as f64 || work > (EXACT_LIMIT as f64) * 64.0 {
        return Err(Error::TooLarge(format!(
            "bit channel {i} of length {n} over {ny} symbols needs {outputs:.0} outputs"
        )));
    }
    let ys = ny.pow(n as u32);
    let scale = T::c(0.5f64.powi(n as i32 - 1));
    let mut raw = Vec::with_capacity(ys << i);
    let mut y = vec![0usize; n];
    let mut x = vec![0u8; n];
    for yc in 0..ys {
        let mut rest = yc;
        for s in y.iter_mut() {
            *s = rest % ny;
            rest /= ny;
        }
        for past in 0..1usize << i {
            let mut p = [T::zero(); 2];
            for (ui, pu) in p.iter_mut().enumerate() {
                for future in 0..1usize << (n - i - 1) {
                    for (j, xj) in x.iter_mut().enumerate() {
                        *xj = if j < i {
                            ((past >> j) & 1) as u8
                        } else if j == i {
                            ui as u8
                        } else {
                            ((future >> (j - i - 1)) & 1) as u8
                        };
                    }
                    polar_transform(&mut x);
                    let mut prod = T::one();
                    for (j, &xj) in x.iter().enumerate() {
                        let (p0, p1) = full[y[j]];
                        prod = prod * if xj == 0 { p0 } else { p1 };
                    }
                    *pu = *pu + prod;
                }
            }
            raw.push((p[0] * scale, p[1] * scale));
        }
    }
    BmsChannel::from_pairs(&raw)
}
