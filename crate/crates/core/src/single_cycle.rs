//! Photon length against idler frequency and the single-cycle point FWHM(ν) = 1/ν.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{PdcError, Result};
use crate::materials::{Dispersion, MaterialModel};
use crate::observables::{auto_grid, fwhm, TauGrid};
use crate::parallel::{try_map, Execution};
use crate::types::{InteractionSpec, SPEED_OF_LIGHT};

/// Bisection stops once the bracket is narrower than this (THz).
pub const NU_TOLERANCE: f64 = 1e-3;

/// Evenly spaced frequencies scanned for sign changes before bisecting.
pub const PRESCAN_POINTS: usize = 64;

/// Crystal length of the single-cycle design, m.
pub const DESIGN_LENGTH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// FWHM of the computed Glauber correlation.
    FullG2,
    /// 1/(c·α_i(ν)).
    HighLossApprox,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::FullG2 => "full-g2",
            Method::HighLossApprox => "high-loss-approx",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleCycleResult {
    /// THz
    pub nu_star: f64,
    pub method: Method,
    /// s
    pub fwhm_at_star: f64,
    /// FWHM(ν*)·ν* − 1
    pub residual: f64,
    pub iterations: usize,
    /// Final bisection bracket, THz.
    pub bracket: (f64, f64),
    pub warnings: Vec<String>,
}

/// Low-gain forward interaction of the design crystal; α_i is set per frequency later.
pub fn design_spec(model: Arc<MaterialModel>, pump_omega: f64, kappa: f64) -> Result<InteractionSpec> {
    let alpha_s = model.signal_loss;
    InteractionSpec::new(
        crate::types::Geometry::Forward,
        DESIGN_LENGTH,
        alpha_s,
        0.0,
        crate::linalg::C64::new(kappa, 0.0),
        model,
        pump_omega,
    )
}

/// Interaction at idler frequency ν: tabulated dispersion linearised about ν,
/// α_i from the absorption model and α_s from the model's signal loss.
pub fn spec_at_idler(spec: &InteractionSpec, model: &MaterialModel, nu_thz: f64) -> Result<InteractionSpec> {
    if !matches!(model.dispersion, Dispersion::Tabulated { .. }) {
        return Err(PdcError::Config(format!(
            "full correlation method needs tabulated index data; material {:?} has none",
            model.name
        )));
    }
    let alpha_i = model.idler_absorption(nu_thz)?;
    let local = model.at_idler(nu_thz)?.linearized(spec.pump_omega)?;
    InteractionSpec::new(
        spec.geometry,
        spec.length,
        model.signal_loss,
        alpha_i,
        spec.kappa,
        Arc::new(local),
        spec.pump_omega,
    )
}

/// Photon length (s) at idler frequency ν (THz).
pub fn fwhm_vs_frequency(spec: &InteractionSpec, model: &MaterialModel, nu_thz: f64, method: Method) -> Result<f64> {
    match method {
        Method::HighLossApprox => Ok(1.0 / (SPEED_OF_LIGHT * model.idler_absorption(nu_thz)?)),
        Method::FullG2 => {
            let local = spec_at_idler(spec, model, nu_thz)?;
            let eval = auto_grid(&local, Execution::default())?;
            fwhm(&eval.correlation(&local, &TauGrid::Conjugate, Execution::default())?)
        }
    }
}

fn cycles_minus_one(spec: &InteractionSpec, model: &MaterialModel, nu: f64, method: Method) -> Result<f64> {
    Ok(fwhm_vs_frequency(spec, model, nu, method)? * nu * 1e12 - 1.0)
}

/// Root of FWHM(ν)·ν − 1 on `bracket` (THz) by pre-scan and bisection.
pub fn find_single_cycle(
    spec: &InteractionSpec,
    model: &MaterialModel,
    bracket: (f64, f64),
    method: Method,
) -> Result<SingleCycleResult> {
    let (lo, hi) = bracket;
    let h = |nu: f64| cycles_minus_one(spec, model, nu, method);
    if !(lo < hi) {
        let h_lo = h(lo).unwrap_or(f64::NAN);
        let h_hi = h(hi).unwrap_or(f64::NAN);
        return Err(PdcError::Bracket { lo, hi, h_lo, h_hi });
    }
    let nus: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (PRESCAN_POINTS - 1) as f64)
        .collect();
    let exec = match method {
        Method::HighLossApprox => Execution::Sequential,
        // each evaluation already spreads its grid over the pool
        Method::FullG2 => Execution::Sequential,
    };
    let hs = try_map(exec, &nus, |&nu| h(nu))?;
    let changes: Vec<usize> = (0..PRESCAN_POINTS - 1)
        .filter(|&k| (hs[k] <= 0.0) != (hs[k + 1] <= 0.0))
        .collect();
    let first = *changes.first().ok_or(PdcError::Bracket {
        lo,
        hi,
        h_lo: hs[0],
        h_hi: hs[PRESCAN_POINTS - 1],
    })?;
    let mut warnings = Vec::new();
    if changes.len() > 1 {
        warnings.push(format!(
            "FWHM(ν)·ν − 1 changes sign {} times on the pre-scan; using the crossing in [{:.4}, {:.4}] THz",
            changes.len(),
            nus[first],
            nus[first + 1]
        ));
    }
    let (mut a, mut b) = (nus[first], nus[first + 1]);
    let mut ha = hs[first];
    let mut iterations = 0;
    while b - a >= NU_TOLERANCE {
        let m = 0.5 * (a + b);
        let hm = h(m)?;
        iterations += 1;
        if (hm <= 0.0) == (ha <= 0.0) {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
    let nu_star = 0.5 * (a + b);
    let fwhm_at_star = fwhm_vs_frequency(spec, model, nu_star, method)?;
    Ok(SingleCycleResult {
        nu_star,
        method,
        fwhm_at_star,
        residual: fwhm_at_star * nu_star * 1e12 - 1.0,
        iterations,
        bracket: (a, b),
        warnings,
    })
}
