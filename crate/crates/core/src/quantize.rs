//! Quantization of channels onto `mu / 2` capacity bins.
//!
//! The half line `y >= 0` of a binary-input AWGN channel is cut into sets
//! `A_1, ..., A_ν` on which `C[λ(y)]` lies in `[(i-1)/ν, i/ν)`. Summing the
//! densities over each set gives a degraded channel; placing the mass of each
//! set at the largest likelihood ratio it may contain gives an upgraded one.
//! Both are within `1/ν` of the true capacity. The same binning applies to a
//! discrete channel whose pairs are sorted into bins by `C[λ]`.

use crate::channel::{BmsChannel, SymbolPair};
use crate::error::{Error, Result};
use crate::merge::pair_budget;
use crate::real::{binary_entropy, Real};
use statrs::function::erf::erfc;
use std::f64::consts::SQRT_2;

/// Bins whose mass falls below this are dropped.
const EMPTY_BIN: f64 = 1e-300;

/// Binary-input AWGN channel with inputs `0 -> +1`, `1 -> -1` and noise
/// variance `sigma2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AwgnSpec {
    pub sigma2: f64,
}

impl AwgnSpec {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::arg(format!("noise variance must be positive, got {sigma2}")));
        }
        Ok(AwgnSpec { sigma2 })
    }

    /// Channel with unit symbol energy at the given `Es/N0` in dB.
    pub fn from_es_n0_db(db: f64) -> Result<Self> {
        Self::new(1.0 / (2.0 * 10f64.powf(db / 10.0)))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Likelihood ratio `f(y|0) / f(y|1) = exp(2y / σ²)`.
    pub fn lr(&self, y: f64) -> f64 {
        (2.0 * y / self.sigma2).exp()
    }

    /// Output value at which the likelihood ratio equals `lambda`.
    pub fn y_of_lr(&self, lambda: f64) -> f64 {
        0.5 * self.sigma2 * lambda.ln()
    }

    /// `P(lo <= Y < hi | input 0)` from complementary error function
    /// differences, taken on the side of the mean that avoids cancellation.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let s = self.sigma() * SQRT_2;
        let (zl, zh) = ((lo - 1.0) / s, (hi - 1.0) / s);
        let upper_tail = |z: f64| 0.5 * erfc(z);
        let lower_tail = |z: f64| 0.5 * erfc(-z);
        let m = if zl >= 0.0 {
            upper_tail(zl) - upper_tail(zh)
        } else if zh <= 0.0 {
            lower_tail(zh) - lower_tail(zl)
        } else {
            1.0 - upper_tail(zh) - lower_tail(zl)
        };
        m.max(0.0)
    }
}

/// Output boundaries and bin ratios for a given noise level and `mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizerGrid {
    pub nu: usize,
    /// `0 = y_0 < y_1 < ... < y_ν = ∞`.
    pub boundaries: Vec<f64>,
    /// `θ_i = C⁻¹[i/ν]` for `i = 1..=ν`; the last one is infinite.
    pub thetas: Vec<f64>,
}

impl QuantizerGrid {
    pub fn new(spec: &AwgnSpec, mu: usize) -> Result<Self> {
        let nu = pair_budget(mu)?;
        let thetas: Vec<f64> = (1..=nu).map(|i| c_inverse(i as f64 / nu as f64)).collect::<Result<_>>()?;
        let mut boundaries = Vec::with_capacity(nu + 1);
        boundaries.push(0.0);
        boundaries.extend(thetas.iter().map(|&t| spec.y_of_lr(t)));
        Ok(QuantizerGrid { nu, boundaries, thetas })
    }

    /// `(P(Y ∈ A_i | 0), P(-Y ∈ A_i | 0))` for each bin.
    fn masses(&self, spec: &AwgnSpec) -> Vec<(f64, f64)> {
        self.boundaries
            .windows(2)
            .map(|w| (spec.interval_mass(w[0], w[1]), spec.interval_mass(-w[1], -w[0])))
            .collect()
    }
}

/// `C[λ] = 1 - h2(1 / (1 + λ))`, the capacity of a BSC with likelihood ratio
/// `λ`. `C[∞] = 1`.
pub fn c_of_lambda<T: Real>(lambda: T) -> Result<T> {
    if !(lambda >= T::one()) {
        return Err(Error::arg(format!("likelihood ratio must be >= 1, got {lambda}")));
    }
    if lambda.is_infinite() {
        return Ok(T::one());
    }
    let one = T::one();
    let p = one / (one + lambda);
    Ok(one - binary_entropy(p))
}

/// Inverse of [`c_of_lambda`] on `[0, 1]`; `1 -> ∞`.
pub fn c_inverse<T: Real>(t: T) -> Result<T> {
    let (zero, one) = (T::zero(), T::one());
    if !(t >= zero && t <= one) {
        return Err(Error::arg(format!("capacity must lie in [0, 1], got {t}")));
    }
    if t == one {
        return Ok(T::infinity());
    }
    if t == zero {
        return Ok(one);
    }
    // bisection on the crossover probability p = 1 / (1 + λ), where
    // 1 - h2(p) is decreasing on (0, 1/2]
    let target = one - t;
    let (mut lo, mut hi) = (zero, T::half());
    for _ in 0..200 {
        let mid = T::half() * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = T::half() * (lo + hi);
    Ok((one - p) / p)
}

fn bin_pairs<T: Real>(masses: impl Iterator<Item = (f64, f64)>) -> Vec<SymbolPair<T>> {
    masses
        .filter(|&(a, b)| a + b >= EMPTY_BIN)
        .map(|(a, b)| SymbolPair::new(T::c(a), T::c(b)))
        .collect()
}

fn upgraded_pair(pi: f64, theta: f64) -> (f64, f64) {
    if theta.is_infinite() {
        (pi, 0.0)
    } else {
        let b = pi / (theta + 1.0);
        (pi - b, b)
    }
}

/// Degraded quantization of a binary-input AWGN channel to at most `mu`
/// output symbols. Loses at most `2 / mu` bits of capacity.
pub fn degrade_awgn<T: Real>(spec: &AwgnSpec, mu: usize) -> Result<BmsChannel<T>> {
    let grid = QuantizerGrid::new(spec, mu)?;
    BmsChannel::canonicalize(bin_pairs(grid.masses(spec).into_iter()))
}

/// Upgraded quantization of a binary-input AWGN channel to at most `mu`
/// output symbols. Gains at most `2 / mu` bits of capacity.
pub fn upgrade_awgn<T: Real>(spec: &AwgnSpec, mu: usize) -> Result<BmsChannel<T>> {
    let grid = QuantizerGrid::new(spec, mu)?;
    let masses = grid.masses(spec);
    let pairs = masses.iter().zip(&grid.thetas).map(|(&(a, b), &theta)| upgraded_pair(a + b, theta));
    BmsChannel::canonicalize(bin_pairs(pairs))
}

/// Degraded and upgraded quantizations side by side.
pub fn sandwich_awgn<T: Real>(spec: &AwgnSpec, mu: usize) -> Result<Sandwich<T>> {
    Ok(Sandwich { degraded: degrade_awgn(spec, mu)?, upgraded: upgrade_awgn(spec, mu)? })
}

/// Bin index in `0..nu` of a pair with likelihood ratio `lambda`.
fn bin_of<T: Real>(lambda: T, nu: usize) -> usize {
    let c = c_of_lambda(lambda).map(|c| c.f64()).unwrap_or(0.0);
    ((c * nu as f64).floor() as usize).min(nu - 1)
}

/// Degrades a discrete channel by summing the pairs that share a capacity bin.
pub fn degrade_discrete<T: Real>(ch: &BmsChannel<T>, mu: usize) -> Result<BmsChannel<T>> {
    let nu = pair_budget(mu)?;
    let mut bins = vec![SymbolPair { a: T::zero(), b: T::zero() }; nu];
    for p in ch.pairs() {
        let bin = &mut bins[bin_of(p.lr(), nu)];
        bin.a = bin.a + p.a;
        bin.b = bin.b + p.b;
    }
    BmsChannel::canonicalize(bins)
}

/// Upgrades a discrete channel by moving every pair to the upper ratio
/// `C⁻¹[i/ν]` of its capacity bin.
pub fn upgrade_discrete<T: Real>(ch: &BmsChannel<T>, mu: usize) -> Result<BmsChannel<T>> {
    let nu = pair_budget(mu)?;
    let mut pis = vec![T::zero(); nu];
    for p in ch.pairs() {
        let i = bin_of(p.lr(), nu);
        pis[i] = pis[i] + p.mass();
    }
    let mut out = Vec::with_capacity(nu);
    for (i, pi) in pis.into_iter().enumerate() {
        if pi > T::zero() {
            let theta: T = c_inverse(T::c((i + 1) as f64 / nu as f64))?;
            let (a, b) = if theta.is_infinite() {
                (pi, T::zero())
            } else {
                let b = pi / (theta + T::one());
                (pi - b, b)
            };
            out.push(SymbolPair { a, b });
        }
    }
    BmsChannel::canonicalize(out)
}

/// A degraded and an upgraded finite stand-in for the same channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Sandwich<T> {
    pub degraded: BmsChannel<T>,
    pub upgraded: BmsChannel<T>,
}

impl<T: Real> From<BmsChannel<T>> for Sandwich<T> {
    fn from(ch: BmsChannel<T>) -> Self {
        Sandwich { degraded: ch.clone(), upgraded: ch }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::pair_capacity;

    #[test]
    fn c_of_lambda_values() {
        assert_eq!(c_of_lambda(1.0f64).unwrap(), 0.0);
        assert_eq!(c_of_lambda(f64::INFINITY).unwrap(), 1.0);
        let direct = 1.0 - 0.75 * (4.0f64 / 3.0).log2() - 0.25 * 4f64.log2();
        let c3 = c_of_lambda(3.0f64).unwrap();
        assert!((c3 - direct).abs() < 1e-15);
        assert!((c3 - 0.18872).abs() < 1e-5);
        assert!((c3 - pair_capacity(0.75, 0.25)).abs() < 1e-15);
        assert!(c_of_lambda(0.5f64).is_err());
    }

    #[test]
    fn c_inverse_values() {
        assert_eq!(c_inverse(0.0f64).unwrap(), 1.0);
        assert!(c_inverse(1.0f64).unwrap().is_infinite());
        let c3 = c_of_lambda(3.0f64).unwrap();
        assert!((c_inverse(c3).unwrap() - 3.0).abs() < 1e-9);
        assert!((c_inverse(0.18872f64).unwrap() - 3.0).abs() < 1e-3);
        for k in 1..1000 {
            let t = k as f64 / 1000.0;
            let l = c_inverse(t).unwrap();
            assert!((c_of_lambda(l).unwrap() - t).abs() <= 1e-12, "t = {t}");
        }
        assert!(c_inverse(-0.1f64).is_err());
        assert!(c_inverse(1.1f64).is_err());
    }

    #[test]
    fn interval_mass_partitions_line() {
        let spec = AwgnSpec::new(0.7).unwrap();
        let cuts = [f64::NEG_INFINITY, -3.0, -0.2, 0.0, 0.9, 1.1, 4.0, f64::INFINITY];
        let total: f64 = cuts.windows(2).map(|w| spec.interval_mass(w[0], w[1])).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_boundaries_hit_capacity_levels() {
        let spec = AwgnSpec::new(0.5).unwrap();
        let grid = QuantizerGrid::new(&spec, 16).unwrap();
        assert_eq!(grid.boundaries.len(), 9);
        assert_eq!(grid.boundaries[0], 0.0);
        assert!(grid.boundaries[8].is_infinite());
        for i in 1..8 {
            let c = c_of_lambda(spec.lr(grid.boundaries[i])).unwrap();
            assert!((c - i as f64 / 8.0).abs() < 1e-10);
        }
    }

    #[test]
    fn upgraded_masses_partition() {
        for sigma2 in [0.01, 0.1581, 1.0, 10.0] {
            let spec = AwgnSpec::new(sigma2).unwrap();
            let grid = QuantizerGrid::new(&spec, 64).unwrap();
            let total: f64 = grid.masses(&spec).iter().map(|(a, b)| a + b).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn awgn_sides_bracket() {
        let spec = AwgnSpec::new(1.0).unwrap();
        let q: BmsChannel<f64> = degrade_awgn(&spec, 4).unwrap();
        let qu: BmsChannel<f64> = upgrade_awgn(&spec, 4).unwrap();
        assert!(q.len() <= 2 && qu.len() <= 2);
        assert!(q.capacity() <= qu.capacity());
        assert!(qu.capacity() - q.capacity() <= 1.0);
    }

    #[test]
    fn single_bin_upgrade_is_noiseless() {
        let spec = AwgnSpec::new(0.3).unwrap();
        let qu: BmsChannel<f64> = upgrade_awgn(&spec, 2).unwrap();
        assert_eq!(qu, BmsChannel::noiseless());
    }

    #[test]
    fn near_noiseless_limit() {
        let spec = AwgnSpec::new(1e-3).unwrap();
        let q: BmsChannel<f64> = degrade_awgn(&spec, 4).unwrap();
        assert!(q.capacity() > 1.0 - 1e-9);
    }

    #[test]
    fn discrete_binning_brackets() {
        let ch = BmsChannel::<f64>::from_half_pairs(&[
            (0.1, 0.09),
            (0.2, 0.1),
            (0.2, 0.05),
            (0.15, 0.01),
            (0.1, 0.0),
        ])
        .unwrap();
        for mu in [2, 4, 8] {
            let d = degrade_discrete(&ch, mu).unwrap();
            let u = upgrade_discrete(&ch, mu).unwrap();
            assert!(d.len() <= mu / 2 && u.len() <= mu / 2);
            assert!(d.capacity() <= ch.capacity() + 1e-15);
            assert!(u.capacity() >= ch.capacity() - 1e-15);
            assert!(ch.capacity() - d.capacity() <= 2.0 / mu as f64);
            assert!(u.capacity() - ch.capacity() <= 2.0 / mu as f64);
        }
    }

    #[test]
    fn es_n0_conversion() {
        let spec = AwgnSpec::from_es_n0_db(5.0).unwrap();
        assert!((spec.sigma2 - 0.1581).abs() < 1e-4);
        assert!(AwgnSpec::new(0.0).is_err());
    }
}
