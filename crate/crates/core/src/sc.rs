//! Polar encoder, successive-cancellation decoder and a Monte-Carlo harness
//! for checking constructed codes against their union bound.
//!
//! Codewords are `x = u B_n G^{⊗m}`. Undoing the bit reversal on the received
//! LLRs leaves `u G^{⊗m}`, which the decoder peels recursively: the first half
//! of `u` sees the minus combination of the two codeword halves, the second
//! half the plus combination. This is the index convention of the
//! construction, so bit channel `i` there is the channel `u_i` sees here.

use crate::construct::{bit_reverse, log2_length, polar_transform, ConstructionResult};
use crate::error::{Error, Result};
use crate::preset::ChannelPreset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959964;

/// Trials per independently seeded batch.
const BATCH: u64 = 1000;

/// A polar code with all frozen bits set to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarCode {
    n: usize,
    m: u32,
    frozen: Vec<bool>,
    /// `frozen_before[i]` counts frozen indices below `i`.
    frozen_before: Vec<usize>,
    info: Vec<usize>,
    union_bound: Option<f64>,
}

impl PolarCode {
    pub fn new(n: usize, frozen_set: &[usize]) -> Result<Self> {
        let m = log2_length(n)?;
        let mut frozen = vec![false; n];
        for &i in frozen_set {
            if i >= n {
                return Err(Error::arg(format!("frozen index {i} out of range for n = {n}")));
            }
            frozen[i] = true;
        }
        let info = (0..n).filter(|&i| !frozen[i]).collect();
        let mut frozen_before = Vec::with_capacity(n + 1);
        frozen_before.push(0);
        for &f in &frozen {
            frozen_before.push(frozen_before.last().unwrap() + f as usize);
        }
        Ok(PolarCode { n, m, frozen, frozen_before, info, union_bound: None })
    }

    pub fn from_construction(result: &ConstructionResult) -> Result<Self> {
        let mut code = Self::new(result.n, &result.frozen_set)?;
        code.union_bound = Some(result.union_bound);
        Ok(code)
    }

    pub fn with_union_bound(mut self, bound: f64) -> Self {
        self.union_bound = Some(bound);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.info.len()
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn union_bound(&self) -> Option<f64> {
        self.union_bound
    }

    fn all_frozen(&self, first: usize, len: usize) -> bool {
        self.frozen_before[first + len] - self.frozen_before[first] == len
    }

    /// Places `message` on the information set in ascending index order and
    /// encodes.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k() {
            return Err(Error::arg(format!("message has {} bits, code dimension is {}", message.len(), self.k())));
        }
        let mut u = vec![0u8; self.n];
        for (&i, &bit) in self.info.iter().zip(message) {
            u[i] = bit & 1;
        }
        polar_transform(&mut u);
        Ok(u)
    }

    /// Successive-cancellation decoding of channel LLRs `ln W(y|0)/W(y|1)`.
    /// Returns the message bits; ties decide zero.
    pub fn decode(&self, llrs: &[f64]) -> Result<Vec<u8>> {
        if llrs.len() != self.n {
            return Err(Error::arg(format!("got {} LLRs for a code of length {}", llrs.len(), self.n)));
        }
        let mut dec = Decoder::new(self.n);
        let mut u = vec![0u8; self.n];
        dec.run(self, llrs, &mut u);
        Ok(self.info.iter().map(|&i| u[i]).collect())
    }
}

/// Exact check-node update `2 atanh(tanh(a/2) tanh(b/2))`, evaluated as
/// `sign · min(|a|, |b|) + ln(1 + e^{-|a+b|}) - ln(1 + e^{-|a-b|})`.
#[inline]
pub fn llr_f(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let (aa, ab) = (a.abs(), b.abs());
    let (lo, hi) = if aa < ab { (aa, ab) } else { (ab, aa) };
    if hi.is_infinite() {
        return sign * lo;
    }
    // the two magnitudes |a ± b| are hi + lo and hi - lo
    let d = hi - lo;
    if d > 50.0 {
        return sign * lo;
    }
    let ed = (-d).exp();
    let es = ed * (-2.0 * lo).exp();
    sign * (lo + ((es - ed) / (1.0 + ed)).ln_1p())
}

/// Variable-node update given the already decided partial sum `bit`.
#[inline]
pub fn llr_g(a: f64, b: f64, bit: u8) -> f64 {
    let v = if bit == 0 { b + a } else { b - a };
    if v.is_nan() {
        0.0
    } else {
        v
    }
}

/// Reusable buffers: the node of length `len` keeps its LLRs in
/// `llr[len..2 len]` and its re-encoded bits in `bits[len..2 len]`.
struct Decoder {
    llr: Vec<f64>,
    bits: Vec<u8>,
}

impl Decoder {
    fn new(n: usize) -> Self {
        Decoder { llr: vec![0.0; 2 * n], bits: vec![0; 2 * n] }
    }

    fn run(&mut self, code: &PolarCode, llrs: &[f64], u: &mut [u8]) {
        let n = code.n;
        for k in 0..n {
            self.llr[n + k] = llrs[bit_reverse(k, code.m)];
        }
        self.node(code, n, 0, u);
    }

    fn node(&mut self, code: &PolarCode, len: usize, first: usize, u: &mut [u8]) {
        if code.all_frozen(first, len) {
            // every decision in the subtree is a frozen zero
            u[first..first + len].fill(0);
            self.bits[len..2 * len].fill(0);
            return;
        }
        if len == 1 {
            let bit = if code.frozen[first] || !(self.llr[1] < 0.0) { 0 } else { 1 };
            u[first] = bit;
            self.bits[1] = bit;
            return;
        }
        let h = len / 2;
        {
            let (lo, hi) = self.llr.split_at_mut(len);
            for j in 0..h {
                lo[h + j] = llr_f(hi[j], hi[h + j]);
            }
        }
        self.node(code, h, first, u);
        self.bits.copy_within(h..len, len);
        {
            let (lo, hi) = self.llr.split_at_mut(len);
            for j in 0..h {
                lo[h + j] = llr_g(hi[j], hi[h + j], self.bits[len + j]);
            }
        }
        self.node(code, h, first + h, u);
        for j in 0..h {
            let b = self.bits[h + j];
            self.bits[len + j] ^= b;
            self.bits[len + h + j] = b;
        }
    }
}

/// Block-error statistics of a simulation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub block_errors: u64,
    pub estimated_bler: f64,
    pub wilson_lower_95: f64,
    pub wilson_upper_95: f64,
    pub union_bound: Option<f64>,
}

/// Wilson score interval for `errors` out of `trials` at normal quantile `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Sends random messages over `channel` and counts SC block errors.
/// Deterministic for a given seed: trials are split into fixed batches, each
/// with its own stream of a seeded ChaCha generator.
pub fn simulate(code: &PolarCode, channel: &ChannelPreset, trials: u64, seed: u64) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::arg("at least one trial is required"));
    }
    let batches = trials.div_ceil(BATCH);
    let block_errors: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH.min(trials - b * BATCH);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut dec = Decoder::new(code.n);
            let mut msg = vec![0u8; code.k()];
            let mut llrs = vec![0.0; code.n];
            let mut u = vec![0u8; code.n];
            let mut errors = 0;
            for _ in 0..count {
                for bit in msg.iter_mut() {
                    *bit = rng.gen::<bool>() as u8;
                }
                let x = code.encode(&msg).expect("message length matches");
                for (l, &xi) in llrs.iter_mut().zip(&x) {
                    *l = channel.sample_llr(xi, &mut rng);
                }
                dec.run(code, &llrs, &mut u);
                if code.info.iter().zip(&msg).any(|(&i, &bit)| u[i] != bit) {
                    errors += 1;
                }
            }
            errors
        })
        .sum();
    let (lo, hi) = wilson_interval(block_errors, trials, Z95);
    Ok(SimReport {
        trials,
        block_errors,
        estimated_bler: block_errors as f64 / trials as f64,
        wilson_lower_95: lo,
        wilson_upper_95: hi,
        union_bound: code.union_bound,
    })
}
