//! Binary-input memoryless symmetric channels in half-alphabet form.
//!
//! A BMS channel with output alphabet `{y_1, ȳ_1, ..., y_L, ȳ_L}` is stored as
//! the `L` pairs `(a_i, b_i) = (W(y_i|0), W(ȳ_i|0))`, with the representative
//! of every conjugate pair chosen so that `a_i >= b_i`. Symmetry supplies the
//! other half of the transition matrix: `W(y_i|1) = b_i`, `W(ȳ_i|1) = a_i`.
//!
//! Canonical channels are sorted by strictly increasing likelihood ratio and
//! carry no zero-mass pairs. Erasure (self-conjugate) mass is represented as a
//! pair with `a == b`.

use crate::error::{Error, Result};
use crate::real::{xlog2, Real};
use std::cmp::Ordering;
use std::fmt::Write as _;

/// Probabilities of a conjugate output pair given input zero.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SymbolPair<T> {
    /// `W(y|0)`, the larger of the two masses.
    pub a: T,
    /// `W(ȳ|0) = W(y|1)`.
    pub b: T,
}

impl<T: Real> SymbolPair<T> {
    /// Builds a pair, swapping the arguments if needed so that `a >= b`.
    pub fn new(a: T, b: T) -> Self {
        if a >= b {
            SymbolPair { a, b }
        } else {
            SymbolPair { a: b, b: a }
        }
    }

    /// Total mass `a + b` of the conjugate pair.
    #[inline]
    pub fn mass(&self) -> T {
        self.a + self.b
    }

    /// Likelihood ratio `a / b`, infinite when `b == 0`.
    #[inline]
    pub fn lr(&self) -> T {
        if self.b > T::zero() {
            self.a / self.b
        } else {
            T::infinity()
        }
    }

    /// Capacity contribution `C(a, b)` of the pair, in bits.
    #[inline]
    pub fn capacity(&self) -> T {
        pair_capacity(self.a, self.b)
    }

    /// Capacity per unit of mass, i.e. `C[lr]`.
    #[inline]
    pub fn unit_capacity(&self) -> T {
        let s = self.mass();
        if s > T::zero() {
            pair_capacity(self.a, self.b) / s
        } else {
            T::zero()
        }
    }

    /// Bhattacharyya contribution of both symbols, `2 sqrt(a b)`.
    #[inline]
    pub fn bhattacharyya(&self) -> T {
        T::two() * (self.a * self.b).sqrt()
    }

    /// Orders by likelihood ratio. Quotients are compared rather than cross
    /// products, which underflow for pairs with very small masses.
    pub fn cmp_lr(&self, other: &Self) -> Ordering {
        self.lr().partial_cmp(&other.lr()).unwrap_or(Ordering::Equal)
    }

    /// Exact floating-point equality of the likelihood ratios.
    pub fn same_lr(&self, other: &Self) -> bool {
        let (x, y) = (self.lr(), other.lr());
        if x.is_infinite() || y.is_infinite() {
            return x == y;
        }
        let lhs = self.a * other.b;
        (lhs.is_normal() && lhs == other.a * self.b) || x == y
    }
}

/// `C(a, b) = -(a+b) log2((a+b)/2) + a log2 a + b log2 b`, with `0 log 0 = 0`.
#[inline]
pub fn pair_capacity<T: Real>(a: T, b: T) -> T {
    let s = a + b;
    if s <= T::zero() {
        return T::zero();
    }
    // s log2(s/2) = s log2 s - s; halving first would underflow subnormal s
    xlog2(a) + xlog2(b) - xlog2(s) + s
}

/// Likelihood ratio of a pair; `∞` when the conjugate mass is zero.
pub fn lr<T: Real>(pair: &SymbolPair<T>) -> T {
    pair.lr()
}

/// The three scalar functionals of a channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarBounds<T> {
    /// ML decision error probability.
    pub pe: T,
    /// Bhattacharyya parameter.
    pub z: T,
    /// Capacity in bits per channel use.
    pub i: T,
}

/// A canonical BMS channel. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct BmsChannel<T> {
    pairs: Vec<SymbolPair<T>>,
}

impl<T: Real> BmsChannel<T> {
    /// Ingests a full output alphabet given as `(W(y|0), W(y|1))` per symbol.
    ///
    /// Symbols with `p0 > p1` become pair representatives, symbols with
    /// `p0 < p1` are taken as their conjugates, and symbols with `p0 == p1`
    /// are pooled as erasure mass, which is split into two conjugate symbols.
    pub fn from_pairs(raw: &[(T, T)]) -> Result<Self> {
        let limit = T::c(T::NORM_LIMIT);
        let mut pairs = Vec::with_capacity(raw.len() / 2 + 1);
        let mut total = T::zero();
        let mut rep_mass = T::zero();
        let mut conj_mass = T::zero();
        let mut erasure = T::zero();
        for (k, &(p0, p1)) in raw.iter().enumerate() {
            if !(p0.is_finite() && p1.is_finite()) || p0 < T::zero() || p1 < T::zero() {
                return Err(Error::input(format!(
                    "symbol {k} has invalid mass ({p0}, {p1})"
                )));
            }
            total = total + p0;
            match p0.partial_cmp(&p1) {
                Some(Ordering::Greater) => {
                    rep_mass = rep_mass + p0;
                    pairs.push(SymbolPair { a: p0, b: p1 });
                }
                Some(Ordering::Less) => conj_mass = conj_mass + p1,
                _ => erasure = erasure + p0,
            }
        }
        if (total - T::one()).abs() > limit {
            return Err(Error::input(format!(
                "masses given input 0 sum to {total}, expected 1"
            )));
        }
        if (rep_mass - conj_mass).abs() > limit {
            return Err(Error::input(
                "channel is not symmetric: conjugate masses do not match",
            ));
        }
        if erasure > T::zero() {
            let half = erasure / T::two();
            pairs.push(SymbolPair { a: half, b: half });
        }
        Self::canonicalize(pairs)
    }

    /// Ingests half-alphabet pairs directly (the on-disk representation).
    pub fn from_half_pairs(raw: &[(T, T)]) -> Result<Self> {
        let mut total = T::zero();
        let mut pairs = Vec::with_capacity(raw.len());
        for (k, &(a, b)) in raw.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) || a < T::zero() || b < T::zero() {
                return Err(Error::input(format!("pair {k} has invalid mass ({a}, {b})")));
            }
            total = total + a + b;
            pairs.push(SymbolPair::new(a, b));
        }
        if (total - T::one()).abs() > T::c(T::NORM_LIMIT) {
            return Err(Error::input(format!("pair masses sum to {total}, expected 1")));
        }
        Self::canonicalize(pairs)
    }

    /// Sorts, drops empty pairs, coalesces equal likelihood ratios and
    /// renormalizes. Every transform and merge funnels its output through here.
    pub(crate) fn canonicalize(mut pairs: Vec<SymbolPair<T>>) -> Result<Self> {
        pairs.retain(|p| p.mass() > T::zero());
        pairs.sort_by(|x, y| x.lr().partial_cmp(&y.lr()).unwrap_or(Ordering::Equal));
        let mut out: Vec<SymbolPair<T>> = Vec::with_capacity(pairs.len());
        for p in pairs {
            match out.last_mut() {
                Some(last) if last.same_lr(&p) => {
                    last.a = last.a + p.a;
                    last.b = last.b + p.b;
                }
                _ => out.push(p),
            }
        }
        let total: T = out.iter().map(|p| p.mass()).sum();
        let drift = (total - T::one()).abs();
        if !(drift <= T::c(T::NORM_LIMIT)) {
            return Err(Error::Consistency(format!(
                "total mass {total} drifted beyond tolerance"
            )));
        }
        if drift > T::c(T::NORM_TOLERANCE) {
            for p in &mut out {
                p.a = p.a / total;
                p.b = p.b / total;
            }
        }
        Ok(BmsChannel { pairs: out })
    }

    /// Wraps pairs that are already canonical. Only for internal producers that
    /// maintain the ordering themselves.
    #[cfg(test)]
    pub(crate) fn from_canonical_unchecked(pairs: Vec<SymbolPair<T>>) -> Self {
        BmsChannel { pairs }
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::arg(format!("crossover probability {p} outside [0, 1]")));
        }
        Self::canonicalize(vec![SymbolPair::new(T::one() - p, p)])
    }

    /// Binary erasure channel with erasure probability `e`.
    pub fn bec(e: T) -> Result<Self> {
        if !(e >= T::zero() && e <= T::one()) {
            return Err(Error::arg(format!("erasure probability {e} outside [0, 1]")));
        }
        let h = e / T::two();
        Self::canonicalize(vec![SymbolPair::new(h, h), SymbolPair::new(T::one() - e, T::zero())])
    }

    /// The perfect channel.
    pub fn noiseless() -> Self {
        BmsChannel { pairs: vec![SymbolPair { a: T::one(), b: T::zero() }] }
    }

    pub fn pairs(&self) -> &[SymbolPair<T>] {
        &self.pairs
    }

    /// Number of conjugate pairs; the output alphabet has twice as many symbols.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        2 * self.pairs.len()
    }

    /// ML error probability: `½ Σ_y min{W(y|0), W(y|1)} = Σ_i b_i`.
    pub fn error_probability(&self) -> T {
        self.pairs.iter().map(|p| p.b).sum()
    }

    /// Bhattacharyya parameter: `Σ_y sqrt(W(y|0) W(y|1))`.
    pub fn bhattacharyya(&self) -> T {
        self.pairs.iter().map(|p| p.bhattacharyya()).sum()
    }

    /// Capacity in bits.
    pub fn capacity(&self) -> T {
        self.pairs.iter().map(|p| p.capacity()).sum()
    }

    pub fn scalar_bounds(&self) -> ScalarBounds<T> {
        ScalarBounds { pe: self.error_probability(), z: self.bhattacharyya(), i: self.capacity() }
    }

    /// Total probability mass, which should be one.
    pub fn total_mass(&self) -> T {
        self.pairs.iter().map(|p| p.mass()).sum()
    }

    /// Expands to the full alphabet as `(W(y|0), W(y|1))` per symbol; the
    /// inverse of [`BmsChannel::from_pairs`].
    pub fn to_full_alphabet(&self) -> Vec<(T, T)> {
        self.pairs.iter().flat_map(|p| [(p.a, p.b), (p.b, p.a)]).collect()
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> BmsChannel<U> {
        BmsChannel {
            pairs: self
                .pairs
                .iter()
                .map(|p| SymbolPair { a: U::c(p.a.f64()), b: U::c(p.b.f64()) })
                .collect(),
        }
    }

    /// Serializes to the `#bms v1` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("#bms v1 pairs={}\n", self.pairs.len());
        for p in &self.pairs {
            let _ = writeln!(s, "{:e}\t{:e}", p.a.f64(), p.b.f64());
        }
        s
    }

    /// Parses the `#bms v1` text format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::input("empty channel file"))?;
        let declared: usize = header
            .strip_prefix("#bms v1 pairs=")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::input(format!("bad channel header `{header}`")))?;
        let mut raw = Vec::with_capacity(declared);
        for line in lines {
            let mut cols = line.split('\t');
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::input(format!("bad channel line `{line}`")));
            };
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("bad number `{v}`")))
            };
            raw.push((T::c(parse(a)?), T::c(parse(b)?)));
        }
        if raw.len() != declared {
            return Err(Error::input(format!(
                "header declares {declared} pairs, found {}",
                raw.len()
            )));
        }
        Self::from_half_pairs(&raw)
    }
}
