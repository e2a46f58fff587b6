//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use polarforge::{pair_capacity, Channel};
use rand::Rng;

/// Exact BEC erasure probabilities of all `2^m` bit channels, MSB of the
/// index consumed first: bit 0 maps `z` to `2z - z^2`, bit 1 to `z^2`.
pub fn bec_erasures(e: f64, m: u32) -> Vec<f64> {
    let n = 1usize << m;
    (0..n)
        .map(|i| {
            (0..m).rev().fold(e, |z, s| if (i >> s) & 1 == 0 { 2.0 * z - z * z } else { z * z })
        })
        .collect()
}

/// `log2(1 + e^{-t})` without overflow.
fn log2_1p_exp_neg(t: f64) -> f64 {
    if t >= 0.0 {
        (-t).exp().ln_1p() / std::f64::consts::LN_2
    } else {
        -t / std::f64::consts::LN_2 + t.exp().ln_1p() / std::f64::consts::LN_2
    }
}

/// Capacity of the binary-input AWGN channel with inputs `±1` and noise
/// variance `sigma2`: `1 - E[log2(1 + exp(-2Y/σ²))]`, `Y ~ N(1, σ²)`, by
/// composite Simpson integration over ±14σ.
pub fn bawgn_capacity(sigma2: f64) -> f64 {
    let sigma = sigma2.sqrt();
    let (lo, hi) = (1.0 - 14.0 * sigma, 1.0 + 14.0 * sigma);
    let steps = 200_000;
    let h = (hi - lo) / steps as f64;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let f = |y: f64| {
        let d = (y - 1.0) / sigma;
        norm * (-0.5 * d * d).exp() * log2_1p_exp_neg(2.0 * y / sigma2)
    };
    let mut acc = f(lo) + f(hi);
    for s in 1..steps {
        let w = if s % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + s as f64 * h);
    }
    1.0 - acc * h / 3.0
}

/// Channel from `(lr, mass)` specs; masses are normalized to one.
pub fn channel_from_specs(specs: &[(f64, f64)]) -> Channel {
    let total: f64 = specs.iter().map(|s| s.1).sum();
    let raw: Vec<(f64, f64)> = specs
        .iter()
        .map(|&(lr, w)| {
            let pi = w / total;
            if lr.is_infinite() {
                (pi, 0.0)
            } else {
                (lr * pi / (lr + 1.0), pi / (lr + 1.0))
            }
        })
        .collect();
    Channel::from_half_pairs(&raw).expect("valid channel")
}

/// Random channel with `len` pairs and LRs spread over several decades.
pub fn random_channel<R: Rng>(rng: &mut R, len: usize) -> Channel {
    let specs: Vec<(f64, f64)> = (0..len)
        .map(|_| {
            let lr = if rng.gen_bool(0.05) { f64::INFINITY } else { 10f64.powf(rng.gen_range(0.0..3.0)) };
            (lr, rng.gen_range(0.01..1.0))
        })
        .collect();
    channel_from_specs(&specs)
}

/// Capacity after merging symbol `y_i` with `y_j` (or with the conjugate
/// `ȳ_j` when `conjugate`), by direct summation over the half alphabet.
pub fn capacity_after_merge(ch: &Channel, i: usize, j: usize, conjugate: bool) -> f64 {
    let p = ch.pairs();
    let (x, y) = (p[i], p[j]);
    let merged = if conjugate { pair_capacity(x.a + y.b, x.b + y.a) } else { pair_capacity(x.a + y.a, x.b + y.b) };
    p.iter()
        .enumerate()
        .filter(|&(t, _)| t != i && t != j)
        .map(|(_, q)| q.capacity())
        .sum::<f64>()
        + merged
}

/// Largest capacity over all merges of two distinct symbols, conjugate or not.
pub fn best_any_merge(ch: &Channel) -> f64 {
    let l = ch.len();
    let mut best = f64::NEG_INFINITY;
    for i in 0..l {
        for j in 0..l {
            if i != j {
                best = best.max(capacity_after_merge(ch, i, j, false));
                best = best.max(capacity_after_merge(ch, i, j, true));
            }
        }
    }
    best
}

/// Largest capacity over merges of LR-adjacent representatives.
pub fn best_adjacent_merge(ch: &Channel) -> f64 {
    (0..ch.len() - 1).map(|i| capacity_after_merge(ch, i, i + 1, false)).fold(f64::NEG_INFINITY, f64::max)
}

/// `C[λ, π]`: capacity of a pair given its LR and total mass.
pub fn cap_lr(lr: f64, pi: f64) -> f64 {
    if lr.is_infinite() {
        pi
    } else {
        pair_capacity(lr * pi / (lr + 1.0), pi / (lr + 1.0))
    }
}

/// `Δ[λ1; λ2, π2; λ3]` computed from the split masses directly.
pub fn split_gain(l1: f64, l2: f64, pi2: f64, l3: f64) -> f64 {
    let (a2, b2) = (l2 * pi2 / (l2 + 1.0), pi2 / (l2 + 1.0));
    let (a1, b1, a3, b3) = if l3.is_infinite() {
        let b1 = b2;
        let a1 = l1 * b1;
        (a1, b1, a2 - a1, 0.0)
    } else {
        let b1 = (l3 * b2 - a2) / (l3 - l1);
        let a1 = l1 * b1;
        let b3 = (a2 - l1 * b2) / (l3 - l1);
        (a1, b1, l3 * b3, b3)
    };
    pair_capacity(a1, b1) + pair_capacity(a3, b3) - pair_capacity(a2, b2)
}
