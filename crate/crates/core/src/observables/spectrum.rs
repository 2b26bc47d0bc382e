use std::sync::Arc;

use serde::Serialize;

use crate::error::{PdcError, Result};
use crate::linalg::pairwise_sum;
use crate::parallel::Execution;
use crate::transfer::LANGEVIN_WEIGHT;
use crate::types::{FrequencyGrid, InteractionSpec, Label, SpectrumCurve};

use super::evaluate::{GridEvaluation, PointValues};

/// Count rates with their parametric (|B|², |C|²) and Langevin (∫|F|², ∫|G|²) parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub r_s: f64,
    pub r_i: f64,
    pub parametric_s: f64,
    pub langevin_s: f64,
    pub parametric_i: f64,
    pub langevin_i: f64,
}

/// Trapezoid rule on a uniform grid with ordered pairwise summation.
pub(crate) fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => (pairwise_sum(values) - 0.5 * (values[0] + values[n - 1])) * step,
    }
}

impl GridEvaluation {
    pub fn spectrum(&self, label: Label) -> Result<SpectrumCurve> {
        let f = match label {
            Label::Signal => PointValues::signal_density,
            Label::Idler => PointValues::idler_density,
        };
        SpectrumCurve::new(self.grid.clone(), self.points.iter().map(f).collect(), label)
    }

    /// Count rates on this grid; fails when the grid edge criterion does not hold.
    pub fn rates(&self) -> Result<RatePair> {
        self.check_edges()?;
        let dw = self.grid.spacing();
        let norm = 1.0 / (2.0 * std::f64::consts::PI);
        let part = |f: fn(&PointValues) -> f64| {
            let v: Vec<f64> = self.points.iter().map(f).collect();
            trapezoid(&v, dw) * norm
        };
        let parametric_s = part(|p| p.b2);
        let langevin_s = part(|p| LANGEVIN_WEIGHT * p.ff);
        let parametric_i = part(|p| p.c2);
        let langevin_i = part(|p| LANGEVIN_WEIGHT * p.gg);
        Ok(RatePair {
            r_s: parametric_s + langevin_s,
            r_i: parametric_i + langevin_i,
            parametric_s,
            langevin_s,
            parametric_i,
            langevin_i,
        })
    }
}

/// S_s = (|B|² + w∫|F|²)/2π or S_i = (|C|² + w∫|G|²)/2π on `grid`.
pub fn spectral_density(spec: &InteractionSpec, grid: &FrequencyGrid, which: Label) -> Result<SpectrumCurve> {
    GridEvaluation::new(spec, Arc::new(grid.clone()), Execution::default())?.spectrum(which)
}

pub fn count_rates(spec: &InteractionSpec, grid: &FrequencyGrid) -> Result<RatePair> {
    GridEvaluation::new(spec, Arc::new(grid.clone()), Execution::default())?.rates()
}

/// Full width at half maximum of a spectrum, rad/s, by linear interpolation.
pub fn spectral_bandwidth(curve: &SpectrumCurve) -> Result<f64> {
    let v = curve.values();
    let x = curve.grid.detunings();
    let peak = curve.peak();
    if peak <= 0.0 {
        return Err(PdcError::DegenerateCurve("spectrum is identically zero".into()));
    }
    let top = v.iter().position(|&y| y == peak).expect("peak is a sample");
    let half = peak / 2.0;
    let left = (0..top).rev().find(|&k| v[k] < half);
    let right = (top + 1..v.len()).find(|&k| v[k] < half);
    match (left, right) {
        (Some(l), Some(r)) => {
            let cross = |a: usize, b: usize| x[a] + (half - v[a]) / (v[b] - v[a]) * (x[b] - x[a]);
            Ok(cross(r - 1, r) - cross(l + 1, l))
        }
        _ => Err(PdcError::DegenerateCurve(
            "spectrum does not fall to half maximum inside the grid".into(),
        )),
    }
}
