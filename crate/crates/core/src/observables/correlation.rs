use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::FftPlanner;

use crate::error::{PdcError, Result};
use crate::linalg::{pairwise_sum, pairwise_sum_c, C64};
use crate::materials::delta_k_slope;
use crate::parallel::{map, Execution};
use crate::types::{CorrelationCurve, FrequencyGrid, Geometry, InteractionSpec};

use super::evaluate::GridEvaluation;
use super::spectrum::trapezoid;

/// Fraction of the samples on each side covered by the raised-cosine taper;
/// one half tapers the whole band.
pub const TAPER_FRACTION: f64 = 0.5;

/// Sub-samples per tau step used to refine each half-maximum crossing.
pub const FWHM_REFINEMENT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum TauGrid {
    /// The discrete conjugate of the frequency grid, dτ = 2π/(n·dω), evaluated by FFT.
    Conjugate,
    /// Arbitrary increasing delays (s), evaluated by direct summation.
    Explicit(Vec<f64>),
}

/// Raised-cosine weights, 1 in the interior and tapering to 0 over the outer
/// [`TAPER_FRACTION`] of samples on each side.
pub fn taper_weights(n: usize) -> Vec<f64> {
    let m = ((n as f64 * TAPER_FRACTION).round() as usize).min(n / 2);
    (0..n)
        .map(|k| {
            let d = k.min(n - 1 - k);
            if d >= m {
                1.0
            } else {
                0.5 * (1.0 - (PI * (d as f64 + 0.5) / m as f64).cos())
            }
        })
        .collect()
}

/// Time scale the delay window must cover on each side of the support start:
/// L|Δk′| without loss, shrinking to |Δk′|/(α_s + α_i) at high loss.
pub fn correlation_scale(spec: &InteractionSpec) -> Result<f64> {
    let slope = delta_k_slope(&spec.dispersion, spec)?.abs();
    let x = (spec.alpha_s + spec.alpha_i) * spec.length;
    let shape = if x < 1e-8 { 1.0 } else { -(-x).exp_m1() / x };
    Ok(spec.length * slope * shape)
}

/// Tapered, shifted amplitude samples ready for the Fourier sum, plus the
/// kernel sign s = sign(dΔk/dω).
struct Transform {
    detunings: Arc<Vec<f64>>,
    samples: Arc<Vec<C64>>,
    sign: f64,
    spacing: f64,
}

impl Transform {
    fn new(spec: &InteractionSpec, grid: &FrequencyGrid, phi: &[C64]) -> Result<Self> {
        let slope = delta_k_slope(&spec.dispersion, spec)?;
        let sign = if slope < 0.0 { -1.0 } else { 1.0 };
        // the lossless backward support is centred on zero delay; move its start to τ = 0
        let t0 = match spec.geometry {
            Geometry::Forward => 0.0,
            Geometry::Backward => 0.5 * spec.length * slope.abs(),
        };
        let w = taper_weights(grid.len());
        let samples = grid
            .detunings()
            .iter()
            .zip(phi)
            .zip(&w)
            .map(|((&x, &p), &wk)| p * wk * C64::from_polar(1.0, sign * x * t0))
            .collect();
        Ok(Transform {
            detunings: Arc::new(grid.detunings().to_vec()),
            samples: Arc::new(samples),
            sign,
            spacing: grid.spacing(),
        })
    }

    /// (1/2π)·Σ φ̃_k e^{−i s ω′_k τ} dω.
    fn amplitude(detunings: &[f64], samples: &[C64], sign: f64, spacing: f64, tau: f64) -> C64 {
        let terms: Vec<C64> = detunings
            .iter()
            .zip(samples)
            .map(|(&x, &p)| p * C64::from_polar(1.0, -sign * x * tau))
            .collect();
        pairwise_sum_c(&terms) * (spacing / (2.0 * PI))
    }

    fn conjugate(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.samples.len();
        let dtau = 2.0 * PI / (n as f64 * self.spacing);
        // ω′_k τ_j = 2π(k − (n−1)/2)(j − n/2)/n: a DFT of (−1)^k φ̃_k up to a unit phase
        let mut buf: Vec<C64> = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, &p)| if k % 2 == 1 { -p } else { p })
            .collect();
        let mut planner = FftPlanner::<f64>::new();
        let fft = if self.sign > 0.0 {
            planner.plan_fft_forward(n)
        } else {
            planner.plan_fft_inverse(n)
        };
        fft.process(&mut buf);
        let scale = self.spacing / (2.0 * PI);
        let tau = (0..n).map(|j| (j as f64 - (n / 2) as f64) * dtau).collect();
        let power = buf.iter().map(|a| (a * scale).norm_sqr()).collect();
        (tau, power)
    }
}

/// Floor-relative integral of |φ̃|² dω, for the transform-consistency check.
pub fn tapered_norm(spec: &InteractionSpec, eval: &GridEvaluation) -> Result<f64> {
    let t = Transform::new(spec, &eval.grid, &eval.wavefunction().values)?;
    let v: Vec<f64> = t.samples.iter().map(|p| p.norm_sqr()).collect();
    Ok(pairwise_sum(&v) * t.spacing)
}

impl GridEvaluation {
    /// G²(τ) = |(1/2π)∫φ̃(ω′)e^{−isω′τ}dω′|² + R_s·R_i, where φ̃ is the tapered
    /// wavefunction.
    pub fn correlation(&self, spec: &InteractionSpec, tau: &TauGrid, exec: Execution) -> Result<CorrelationCurve> {
        let rates = self.rates()?;
        let floor = rates.r_s * rates.r_i;
        let t = Transform::new(spec, &self.grid, &self.wavefunction().values)?;
        let need = 2.0 * correlation_scale(spec)?;
        let (taus, power) = match tau {
            TauGrid::Conjugate => t.conjugate(),
            TauGrid::Explicit(taus) => {
                if taus.len() < 2 {
                    return Err(PdcError::Config("explicit tau grid needs at least 2 delays".into()));
                }
                let span = taus[taus.len() - 1] - taus[0];
                if span * t.spacing > 2.0 * PI {
                    return Err(PdcError::Resolution(format!(
                        "tau span {span:.3e} s exceeds the alias-free window 2π/dω = {:.3e} s",
                        2.0 * PI / t.spacing
                    )));
                }
                let power = map(exec, taus, |&x| {
                    Transform::amplitude(&t.detunings, &t.samples, t.sign, t.spacing, x).norm_sqr()
                });
                (taus.clone(), power)
            }
        };
        if taus[0] > -need || taus[taus.len() - 1] < need {
            return Err(PdcError::Resolution(format!(
                "tau grid [{:.3e}, {:.3e}] s does not cover ±{need:.3e} s",
                taus[0],
                taus[taus.len() - 1]
            )));
        }
        let values = power.iter().map(|p| p + floor).collect();
        let (d, s, sign, dw) = (t.detunings.clone(), t.samples.clone(), t.sign, t.spacing);
        let refiner = Arc::new(move |x: f64| Transform::amplitude(&d, &s, sign, dw, x).norm_sqr() + floor);
        Ok(CorrelationCurve::new(taus, values, floor)?.with_refiner(refiner))
    }
}

/// Glauber correlation on `grid`.
pub fn glauber_g2(spec: &InteractionSpec, grid: &FrequencyGrid, tau: &TauGrid) -> Result<CorrelationCurve> {
    GridEvaluation::new(spec, Arc::new(grid.clone()), Execution::default())?.correlation(
        spec,
        tau,
        Execution::default(),
    )
}

/// R_c = ∫(G² − floor)dτ over the delay grid (trapezoid; uniform grids assumed
/// where the grid is uniform, otherwise panel-wise).
pub fn coincidence_rate(curve: &CorrelationCurve) -> f64 {
    let y = curve.correlated();
    let x = curve.tau();
    let step = x[1] - x[0];
    let uniform = x.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs());
    if uniform {
        return trapezoid(&y, step);
    }
    let panels: Vec<f64> = x
        .windows(2)
        .zip(y.windows(2))
        .map(|(t, g)| 0.5 * (g[0] + g[1]) * (t[1] - t[0]))
        .collect();
    pairwise_sum(&panels)
}

/// Full width at half maximum of G² − floor, in seconds.
///
/// The crossing on each side is bracketed on the samples, re-bracketed on
/// [`FWHM_REFINEMENT`] sub-samples from the curve's refiner when present, and
/// located by linear interpolation.
pub fn fwhm(curve: &CorrelationCurve) -> Result<f64> {
    let y = curve.correlated();
    let x = curve.tau();
    let (top, &peak) = y
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (k, v)| if *v > *acc.1 { (k, v) } else { acc });
    if !(peak > 0.0) {
        return Err(PdcError::DegenerateCurve("correlated part has no peak above the floor".into()));
    }
    let half = peak / 2.0;
    let left = (0..top).rev().find(|&k| y[k] < half);
    let right = (top + 1..y.len()).find(|&k| y[k] < half);
    let (l, r) = match (left, right) {
        (Some(l), Some(r)) => (l, r),
        _ => {
            return Err(PdcError::DegenerateCurve(
                "correlated part does not fall to half maximum inside the delay window".into(),
            ))
        }
    };
    let floor = curve.floor;
    let crossing = |below: usize, above: usize| -> f64 {
        let (xa, xb) = (x[above], x[below]);
        let (ya, yb) = (y[above], y[below]);
        if let Some(refine) = curve.refiner() {
            let m = FWHM_REFINEMENT;
            let pts: Vec<(f64, f64)> = (0..=m)
                .map(|j| {
                    let t = xa + (xb - xa) * j as f64 / m as f64;
                    let v = match j {
                        0 => ya,
                        j if j == m => yb,
                        _ => refine(t) - floor,
                    };
                    (t, v)
                })
                .collect();
            for w in pts.windows(2) {
                if w[1].1 < half {
                    let ((t0, v0), (t1, v1)) = (w[0], w[1]);
                    return t0 + (half - v0) / (v1 - v0) * (t1 - t0);
                }
            }
        }
        xa + (half - ya) / (yb - ya) * (xb - xa)
    };
    Ok(crossing(r, r - 1) - crossing(l, l + 1))
}

/// Relative mismatch of ∫|φ̃|²dω and 2π·R_c on the conjugate grid.
pub fn parseval_residual(spec: &InteractionSpec, eval: &GridEvaluation, curve: &CorrelationCurve) -> Result<f64> {
    let lhs = tapered_norm(spec, eval)?;
    let rhs = 2.0 * PI * coincidence_rate(curve);
    Ok(((lhs - rhs) / lhs.abs().max(1e-300)).abs())
}

/// Mean of G² well outside the correlated support relative to the floor, minus one.
/// `None` when the tau grid does not reach that far.
pub fn floor_deviation(spec: &InteractionSpec, curve: &CorrelationCurve) -> Result<Option<f64>> {
    let support = spec.length * delta_k_slope(&spec.dispersion, spec)?.abs();
    // the leading edge sits at τ = 0 whatever the loss, the trailing one needs the full support
    let lead = 0.5 * correlation_scale(spec)?;
    let far: Vec<f64> = curve
        .tau()
        .iter()
        .zip(curve.values())
        .filter(|(t, _)| **t < -lead || **t > 1.5 * support)
        .map(|(_, v)| *v)
        .collect();
    if far.is_empty() || curve.floor == 0.0 {
        return Ok(None);
    }
    Ok(Some(pairwise_sum(&far) / far.len() as f64 / curve.floor - 1.0))
}
