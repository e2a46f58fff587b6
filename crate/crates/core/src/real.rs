//! Scalar abstraction shared by every numeric routine in the crate.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating point scalar the channel algebra is written against.
///
/// The tolerances are the normalization thresholds applied after every
/// transform and merge: drift above `NORM_TOLERANCE` is rescaled away, drift
/// above `NORM_LIMIT` is reported as an internal-consistency failure.
pub trait Real:
    Float + FromPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    const NORM_TOLERANCE: f64;
    const NORM_LIMIT: f64;

    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::c(0.5)
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const NORM_TOLERANCE: f64 = 1e-12;
    const NORM_LIMIT: f64 = 1e-9;
}

impl Real for f32 {
    const NORM_TOLERANCE: f64 = 1e-6;
    const NORM_LIMIT: f64 = 1e-3;
}

/// `x * log2(x)` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn xlog2<T: Real>(x: T) -> T {
    if x > T::zero() {
        x * x.log2()
    } else {
        T::zero()
    }
}

/// Binary entropy in bits.
#[inline]
pub fn binary_entropy<T: Real>(p: T) -> T {
    -(xlog2(p) + xlog2(T::one() - p))
}
