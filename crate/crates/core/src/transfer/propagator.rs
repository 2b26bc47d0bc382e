use crate::error::{PdcError, Result};
use crate::linalg::{Mat2, C64};

/// Below this |λ₊ − λ₋|·z the two eigenvalues are treated as one.
pub const DEGENERATE_SPLITTING: f64 = 1e-6;

/// e^{−M·z} for a 2×2 matrix via its two eigenvalues λ± = μ ± δ.
///
/// With spectral projectors P± this is e^{−λ₊z}P₊ + e^{−λ₋z}P₋, written as
/// c·I − s·(M − μI) with c = (e^{−λ₊z} + e^{−λ₋z})/2 and
/// s = (e^{−λ₋z} − e^{−λ₊z})/(2δ). For |2δ|·z below the splitting threshold
/// the limiting form e^{−μz}(I − (M − μI)z) is used.
pub fn expm_neg(m: &Mat2, z: f64) -> Result<Mat2> {
    if !m.is_finite() || !z.is_finite() {
        return Err(PdcError::InvalidMatrix(format!("non-finite input: M = {m:?}, z = {z}")));
    }
    if z < 0.0 {
        return Err(PdcError::InvalidMatrix(format!("negative propagation distance {z}")));
    }
    if z == 0.0 {
        return Ok(Mat2::identity());
    }
    let mu = m.trace() * 0.5;
    let a = m.get(0, 0) - mu;
    let delta = (a * a + m.get(0, 1) * m.get(1, 0)).sqrt();
    let n = *m - Mat2::identity().scale(mu);
    let dz = delta * z;
    let (c, s) = if 2.0 * dz.norm() < DEGENERATE_SPLITTING {
        let e = (-mu * z).exp();
        (e, e * z)
    } else if dz.norm() < 1.0 {
        // sinh(δz)/δ without cancellation
        let e = (-mu * z).exp();
        (e * dz.cosh(), e * dz.sinh() / delta)
    } else {
        let ep = (-(mu + delta) * z).exp();
        let em = (-(mu - delta) * z).exp();
        ((ep + em) * 0.5, (em - ep) / (delta * 2.0))
    };
    let out = Mat2::identity().scale(c) - n.scale(s);
    if !out.is_finite() {
        return Err(PdcError::InvalidMatrix(format!(
            "exponential overflowed: M = {m:?}, z = {z}"
        )));
    }
    Ok(out)
}

/// Limiting exponential for coincident eigenvalues, exposed for tests.
pub fn expm_neg_degenerate(m: &Mat2, z: f64) -> Mat2 {
    let mu = m.trace() * 0.5;
    let n = *m - Mat2::identity().scale(mu);
    (Mat2::identity() - n.scale(C64::new(z, 0.0))).scale((-mu * z).exp())
}
