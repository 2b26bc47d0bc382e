use crate::error::{PdcError, Result};
use crate::linalg::{Mat2, C64};
use crate::types::{Geometry, InteractionSpec};

use super::coupling::{build_coupling_matrix, CouplingMatrix};
use super::propagator::expm_neg;

/// |D₁| below which the backward boundary inversion is refused.
pub const BACKWARD_SINGULARITY: f64 = 1e-9;

/// Input–output coefficients at one frequency.
///
/// `a, b, c, d` map the input signal and idler-conjugate operators onto the
/// outputs; `kernel(z)` returns the Langevin weights `(e, f, g, h)` of the
/// signal and idler noise injected at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSet {
    pub geometry: Geometry,
    pub omega: f64,
    pub length: f64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    m: Mat2,
    sqrt_alpha_s: f64,
    sqrt_alpha_i: f64,
    // forward-solution D₁, needed to map the backward kernels
    d1: C64,
}

impl TransferSet {
    /// Forward-solution kernels e^{−M(L−z)}·diag(√α_s, √α_i).
    fn forward_kernel(&self, z: f64) -> [C64; 4] {
        let p = expm_neg(&self.m, self.length - z).unwrap_or_else(|_| Mat2::zero());
        [
            p.get(0, 0) * self.sqrt_alpha_s,
            p.get(0, 1) * self.sqrt_alpha_i,
            p.get(1, 0) * self.sqrt_alpha_s,
            p.get(1, 1) * self.sqrt_alpha_i,
        ]
    }

    /// Langevin kernels (e, f, g, h) at position z ∈ [0, L], units m^(−1/2).
    pub fn kernel(&self, z: f64) -> [C64; 4] {
        match self.geometry {
            Geometry::Forward => self.forward_kernel(z),
            Geometry::Backward => {
                // e = e₁ − B₁g₁/D₁ and f = f₁ − B₁h₁/D₁ cancel badly at high loss;
                // with P(L) = P(L−z)P(z) they reduce to products.
                let s = self.length - z;
                let near = expm_neg(&self.m, z).unwrap_or_else(|_| Mat2::zero());
                let far = expm_neg(&self.m, s).unwrap_or_else(|_| Mat2::zero());
                let inv = self.d1.inv();
                let det = (-self.m.trace() * s).exp() * inv;
                [
                    near.get(1, 1) * det * self.sqrt_alpha_s,
                    -near.get(0, 1) * det * self.sqrt_alpha_i,
                    -far.get(1, 0) * inv * self.sqrt_alpha_s,
                    -far.get(1, 1) * inv * self.sqrt_alpha_i,
                ]
            }
        }
    }

    pub(crate) fn sqrt_losses(&self) -> (f64, f64) {
        (self.sqrt_alpha_s, self.sqrt_alpha_i)
    }

    pub(crate) fn d1(&self) -> C64 {
        self.d1
    }

    pub fn coupling(&self) -> &Mat2 {
        &self.m
    }

    /// Upper bound used to seed the quadrature panel count.
    pub(crate) fn oscillation_scale(&self) -> f64 {
        let mu = self.m.trace() * 0.5;
        let a = self.m.get(0, 0) - mu;
        let delta = (a * a + self.m.get(0, 1) * self.m.get(1, 0)).sqrt();
        (mu.im.abs() + delta.norm() + mu.re.abs()) * 2.0
    }
}

fn sqrt_losses(spec: &InteractionSpec) -> (f64, f64) {
    (spec.alpha_s.sqrt(), spec.alpha_i.sqrt())
}

fn forward_from_matrix(cm: &CouplingMatrix, spec: &InteractionSpec) -> Result<TransferSet> {
    let p = expm_neg(&cm.m, spec.length)?;
    let (sa, si) = sqrt_losses(spec);
    Ok(TransferSet {
        geometry: Geometry::Forward,
        omega: cm.omega,
        length: spec.length,
        a: p.get(0, 0),
        b: p.get(0, 1),
        c: p.get(1, 0),
        d: p.get(1, 1),
        m: cm.m,
        sqrt_alpha_s: sa,
        sqrt_alpha_i: si,
        d1: p.get(1, 1),
    })
}

/// Forward-wave coefficients: (a, b; c, d) = e^{−ML}.
pub fn forward_transfer(spec: &InteractionSpec, omega: f64) -> Result<TransferSet> {
    if spec.geometry != Geometry::Forward {
        return Err(PdcError::Config("forward_transfer called with a backward spec".into()));
    }
    let cm = build_coupling_matrix(spec, omega)?;
    forward_from_matrix(&cm, spec)
}

/// Backward-wave coefficients from the forward solution of the backward M by
/// solving the two-point boundary problem for the idler input at z = L.
pub fn backward_transfer(spec: &InteractionSpec, omega: f64) -> Result<TransferSet> {
    if spec.geometry != Geometry::Backward {
        return Err(PdcError::Config("backward_transfer called with a forward spec".into()));
    }
    let cm = build_coupling_matrix(spec, omega)?;
    backward_from_matrix(&cm, spec)
}

fn backward_from_matrix(cm: &CouplingMatrix, spec: &InteractionSpec) -> Result<TransferSet> {
    let p = expm_neg(&cm.m, spec.length)?;
    let (a1, b1, c1, d1) = (p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1));
    if d1.norm() < BACKWARD_SINGULARITY {
        return Err(PdcError::BackwardSingularity {
            d1_abs: d1.norm(),
            threshold: BACKWARD_SINGULARITY,
            omega: cm.omega,
        });
    }
    let inv = d1.inv();
    let (sa, si) = sqrt_losses(spec);
    Ok(TransferSet {
        geometry: Geometry::Backward,
        omega: cm.omega,
        length: spec.length,
        a: (a1 * d1 - b1 * c1) * inv,
        b: b1 * inv,
        c: -c1 * inv,
        d: inv,
        m: cm.m,
        sqrt_alpha_s: sa,
        sqrt_alpha_i: si,
        d1,
    })
}

/// Coefficients for whichever geometry `spec` declares.
pub fn transfer(spec: &InteractionSpec, omega: f64) -> Result<TransferSet> {
    let cm = build_coupling_matrix(spec, omega)?;
    transfer_from_matrix(&cm, spec)
}

pub(crate) fn transfer_from_matrix(cm: &CouplingMatrix, spec: &InteractionSpec) -> Result<TransferSet> {
    match spec.geometry {
        Geometry::Forward => forward_from_matrix(cm, spec),
        Geometry::Backward => backward_from_matrix(cm, spec),
    }
}
