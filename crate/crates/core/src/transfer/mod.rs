//! Coupling matrix, propagators, transfer coefficients and Langevin kernels.
//!
//! The homogeneous propagation is dv/dz = −M v for v = (a_s, a_i†), so the
//! output coefficients are e^{−ML} and the noise injected at z reaches the
//! output through e^{−M(L−z)}.

mod coupling;
mod exact;
mod moments;
mod propagator;
mod set;

pub use coupling::{build_coupling_matrix, CouplingMatrix};
pub use moments::{
    commutator_sums, fast_moments, langevin_moment, langevin_moments, LangevinMoment, Moments, LANGEVIN_WEIGHT,
    MOMENT_REL_TOL,
};
pub use propagator::{expm_neg, expm_neg_degenerate, DEGENERATE_SPLITTING};
pub use exact::EXACT_MIN_SPLITTING;
pub use set::{backward_transfer, forward_transfer, transfer, TransferSet, BACKWARD_SINGULARITY};
#[cfg(test)]
pub(crate) use set::transfer_from_matrix;

use crate::error::Result;
use crate::linalg::Mat2;

/// e^{−M·distance}.
pub fn propagator(m: &CouplingMatrix, distance: f64) -> Result<Mat2> {
    expm_neg(&m.m, distance)
}
