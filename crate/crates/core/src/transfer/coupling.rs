use crate::error::Result;
use crate::linalg::{Mat2, C64, I};
use crate::materials::delta_k;
use crate::types::{Geometry, InteractionSpec};

/// Coupling matrix M(ω) of the signal / idler-conjugate pair, entries in 1/m.
///
/// Forward:  [[α_s + iΔk/2, −iκ], [ iκ*,  α_i − iΔk/2]]
/// Backward: [[α_s + iΔk/2, −iκ], [−iκ*, −α_i − iΔk/2]]
///
/// In the backward geometry only the idler runs against z, so only its
/// diagonal entry changes sign; the signal still decays along +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub m: Mat2,
    pub omega: f64,
    pub geometry: Geometry,
}

impl CouplingMatrix {
    /// Assemble M from explicit parameters (Δk already evaluated).
    pub fn from_parts(geometry: Geometry, alpha_s: f64, alpha_i: f64, dk: f64, kappa: C64, omega: f64) -> Self {
        let half = C64::new(0.0, dk / 2.0);
        let m = match geometry {
            Geometry::Forward => Mat2::new(
                C64::new(alpha_s, 0.0) + half,
                -I * kappa,
                I * kappa.conj(),
                C64::new(alpha_i, 0.0) - half,
            ),
            Geometry::Backward => Mat2::new(
                C64::new(alpha_s, 0.0) + half,
                -I * kappa,
                -I * kappa.conj(),
                C64::new(-alpha_i, 0.0) - half,
            ),
        };
        CouplingMatrix { m, omega, geometry }
    }
}

/// M(ω) for `spec` at absolute signal angular frequency `omega`.
pub fn build_coupling_matrix(spec: &InteractionSpec, omega: f64) -> Result<CouplingMatrix> {
    let dk = delta_k(&spec.dispersion, spec, omega)?;
    Ok(CouplingMatrix::from_parts(
        spec.geometry,
        spec.alpha_s,
        spec.alpha_i,
        dk,
        spec.kappa,
        omega,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::materials::MaterialModel;
    use crate::types::SPEED_OF_LIGHT;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn all_couplings_off_is_zero() {
        let m = CouplingMatrix::from_parts(Geometry::Forward, 0.0, 0.0, 0.0, ZERO, 0.0);
        assert_eq!(m.m, Mat2::zero());
    }

    #[test]
    fn forward_transcription() {
        let m = CouplingMatrix::from_parts(Geometry::Forward, 2.0, 3.0, 4.0, c(5.0, 0.0), 0.0);
        assert_eq!(m.m, Mat2::new(c(2.0, 2.0), c(0.0, -5.0), c(0.0, 5.0), c(3.0, -2.0)));
    }

    #[test]
    fn backward_transcription() {
        let m = CouplingMatrix::from_parts(Geometry::Backward, 2.0, 3.0, 4.0, c(5.0, 0.0), 0.0);
        assert_eq!(m.m, Mat2::new(c(2.0, 2.0), c(0.0, -5.0), c(0.0, -5.0), c(-3.0, -2.0)));
    }

    #[test]
    fn complex_kappa_enters_conjugated() {
        let k = c(1.0, 2.0);
        let m = CouplingMatrix::from_parts(Geometry::Forward, 0.0, 0.0, 0.0, k, 0.0);
        assert_eq!(m.m.get(0, 1), -I * k);
        assert_eq!(m.m.get(1, 0), I * k.conj());
    }

    #[test]
    fn pure_and_range_checked() {
        let pump = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 1.064e-6;
        let spec = InteractionSpec::new(
            Geometry::Forward,
            0.01,
            0.0,
            50.0,
            c(0.1, 0.0),
            Arc::new(MaterialModel::default_linear()),
            pump,
        )
        .unwrap();
        let w = spec.signal_center() + 3e11;
        assert_eq!(build_coupling_matrix(&spec, w).unwrap(), build_coupling_matrix(&spec, w).unwrap());
        assert!(build_coupling_matrix(&spec, 2.0 * pump).is_err());
    }
}
