//! Named channel families: `bsc:<p>`, `bec:<e>` and `awgn:<sigma2>`.

use crate::channel::BmsChannel;
use crate::error::{Error, Result};
use crate::quantize::{degrade_awgn, upgrade_awgn, AwgnSpec, Sandwich};
use crate::real::Real;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelPreset {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc(f64),
    /// Binary erasure channel with erasure probability `e`.
    Bec(f64),
    /// Binary-input AWGN channel.
    Awgn(AwgnSpec),
}

impl FromStr for ChannelPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::arg(format!("channel `{s}` is not of the form <kind>:<value>")))?;
        let x: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::arg(format!("channel parameter `{value}` is not a number")))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "bsc" if (0.0..=0.5).contains(&x) => Ok(ChannelPreset::Bsc(x)),
            "bec" if (0.0..=1.0).contains(&x) => Ok(ChannelPreset::Bec(x)),
            "awgn" => Ok(ChannelPreset::Awgn(AwgnSpec::new(x)?)),
            "bsc" | "bec" => Err(Error::arg(format!("channel parameter {x} out of range for {kind}"))),
            _ => Err(Error::arg(format!("unknown channel kind `{kind}`"))),
        }
    }
}

impl fmt::Display for ChannelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelPreset::Bsc(p) => write!(f, "bsc:{p}"),
            ChannelPreset::Bec(e) => write!(f, "bec:{e}"),
            ChannelPreset::Awgn(s) => write!(f, "awgn:{}", s.sigma2),
        }
    }
}

impl ChannelPreset {
    /// Finite channels bracketing this one. Discrete channels are exact on
    /// both sides; the AWGN channel is quantized to `quant_mu` symbols.
    pub fn sandwich<T: Real>(&self, quant_mu: usize) -> Result<Sandwich<T>> {
        match *self {
            ChannelPreset::Bsc(p) => Ok(BmsChannel::bsc(T::c(p))?.into()),
            ChannelPreset::Bec(e) => Ok(BmsChannel::bec(T::c(e))?.into()),
            ChannelPreset::Awgn(spec) => Ok(Sandwich {
                degraded: degrade_awgn(&spec, quant_mu)?,
                upgraded: upgrade_awgn(&spec, quant_mu)?,
            }),
        }
    }

    /// Channel log-likelihood ratio `ln W(y|0)/W(y|1)` of one transmission of
    /// `bit`.
    pub fn sample_llr<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> f64 {
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        match *self {
            ChannelPreset::Bsc(p) => {
                let l = ((1.0 - p) / p).ln();
                if rng.gen::<f64>() < p {
                    -sign * l
                } else {
                    sign * l
                }
            }
            ChannelPreset::Bec(e) => {
                if rng.gen::<f64>() < e {
                    0.0
                } else {
                    sign * f64::INFINITY
                }
            }
            ChannelPreset::Awgn(spec) => {
                let y = sign + spec.sigma() * standard_normal(rng);
                2.0 * y / spec.sigma2
            }
        }
    }
}

/// Box-Muller sample from N(0, 1).
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
