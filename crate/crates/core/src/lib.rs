//! Construction of polar codes for binary-input memoryless symmetric channels.
//!
//! Bit-channel quality is bracketed from both sides: each bit channel is
//! approximated by a degraded and by an upgraded channel whose output
//! alphabets stay bounded, giving lower and upper bounds on its error
//! probability and capacity.
//!
//! The numeric core is generic over [`Real`] (`f64` or `f32`); the aliases at
//! the crate root fix it to `f64`.

pub mod channel;
pub mod construct;
pub mod error;
pub mod io;
pub mod merge;
pub mod polarize;
pub mod preset;
pub mod quantize;
pub mod real;
pub mod sc;

pub use channel::{pair_capacity, BmsChannel, ScalarBounds, SymbolPair};
pub use construct::{
    classify, degrade_bit_channel, exact_bit_channel, pe_upper_bound, select_info_set, sweep_all,
    upgrade_bit_channel, BitIndex, ChannelBounds, Classification, ConstructionResult, Modes, Sweep,
    Target,
};
pub use error::{Error, Result};
pub use merge::{degrading_merge, upgrading_merge, DEFAULT_EPS};
pub use polarize::{transform_minus, transform_plus, TransformKind};
pub use preset::ChannelPreset;
pub use quantize::{c_inverse, c_of_lambda, degrade_awgn, upgrade_awgn, AwgnSpec, Sandwich};
pub use real::Real;
pub use sc::{simulate, PolarCode, SimReport};

/// Double-precision channel.
pub type Channel = BmsChannel<f64>;
/// Double-precision symbol pair.
pub type Pair = SymbolPair<f64>;
/// Double-precision bit-channel bounds.
pub type Bounds = ChannelBounds<f64>;
/// Double-precision channel sandwich.
pub type ChannelSandwich = Sandwich<f64>;
