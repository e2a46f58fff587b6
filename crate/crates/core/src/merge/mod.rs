//! Alphabet reduction: merges that shrink a channel to at most `mu / 2`
//! conjugate pairs while moving it in a known direction of the degradation
//! order.

mod degrade;
mod upgrade;
mod workspace;

pub use degrade::{degrading_merge, merge_loss, MergeDatum};
pub use upgrade::{
    delta_capacity_closed_form, triple_split, upgrade_step_pairwise, upgrade_step_triple,
    upgrading_merge, DEFAULT_EPS,
};
pub use workspace::MergeWorkspace;

use crate::error::{Error, Result};

/// Validates an output alphabet size and returns the pair budget `mu / 2`.
pub fn pair_budget(mu: usize) -> Result<usize> {
    if mu < 2 || mu % 2 != 0 {
        return Err(Error::arg(format!("mu must be an even integer >= 2, got {mu}")));
    }
    Ok(mu / 2)
}
