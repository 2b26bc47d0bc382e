use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{PdcError, Result};
use crate::linalg::C64;
use crate::materials::delta_k_slope;
use crate::parallel::{try_map, Execution};
use crate::transfer::{fast_moments, transfer, LANGEVIN_WEIGHT};
use crate::types::{make_grid, FrequencyGrid, InteractionSpec};

/// Edge level (relative to peak) a grid must reach.
pub const EDGE_LIMIT: f64 = 1e-4;

/// Fraction of samples on each side that make up the grid edge.
pub const EDGE_FRACTION: f64 = 0.025;

/// Grid spacing in units of the narrowest spectral feature.
pub const SAMPLES_PER_FEATURE: f64 = 16.0;

pub const AUTO_GRID_START: usize = 256;

/// Smallest band half-width in feature widths. The tapered transform smooths a
/// jump in the correlation amplitude over about 1/half-width.
pub const MIN_HALF_WIDTH_FEATURES: f64 = 512.0;
pub const AUTO_GRID_MAX: usize = 1 << 18;

/// Everything the observables need from one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    /// |B|², |C|²
    pub b2: f64,
    pub c2: f64,
    /// ∫|F|², ∫|G|² without the Langevin weight
    pub ff: f64,
    pub gg: f64,
    /// B*·D
    pub phi_parametric: C64,
    /// weighted ∫F*·H
    pub phi_langevin: C64,
}

impl PointValues {
    pub fn signal_density(&self) -> f64 {
        (self.b2 + LANGEVIN_WEIGHT * self.ff) / (2.0 * PI)
    }

    pub fn idler_density(&self) -> f64 {
        (self.c2 + LANGEVIN_WEIGHT * self.gg) / (2.0 * PI)
    }

    pub fn phi(&self) -> C64 {
        self.phi_parametric + self.phi_langevin
    }
}

pub fn evaluate_point(spec: &InteractionSpec, omega: f64) -> Result<PointValues> {
    let ts = transfer(spec, omega)?;
    let m = fast_moments(&ts)?;
    Ok(PointValues {
        b2: ts.b.norm_sqr(),
        c2: ts.c.norm_sqr(),
        ff: m.ff,
        gg: m.gg,
        phi_parametric: ts.b.conj() * ts.d,
        phi_langevin: m.fh * LANGEVIN_WEIGHT,
    })
}

/// Per-frequency values on a grid, the common input of every observable.
#[derive(Debug, Clone)]
pub struct GridEvaluation {
    pub grid: Arc<FrequencyGrid>,
    pub points: Vec<PointValues>,
}

impl GridEvaluation {
    pub fn new(spec: &InteractionSpec, grid: Arc<FrequencyGrid>, exec: Execution) -> Result<Self> {
        let omegas: Vec<f64> = (0..grid.len()).map(|k| grid.omega(k)).collect();
        let points = try_map(exec, &omegas, |&w| evaluate_point(spec, w))?;
        Ok(GridEvaluation { grid, points })
    }

    /// Largest of |φ|², S_s and S_i over the outer samples, each relative to its peak.
    pub fn edge_ratio(&self) -> f64 {
        let n = self.points.len();
        let edge = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1).min(n / 2);
        let probes: [fn(&PointValues) -> f64; 3] =
            [|p| p.phi().norm_sqr(), PointValues::signal_density, PointValues::idler_density];
        let mut worst: f64 = 0.0;
        for probe in probes {
            let peak = self.points.iter().map(probe).fold(0.0, f64::max);
            if peak <= 0.0 {
                continue;
            }
            let at_edge = self.points[..edge]
                .iter()
                .chain(&self.points[n - edge..])
                .map(probe)
                .fold(0.0, f64::max);
            worst = worst.max(at_edge / peak);
        }
        worst
    }

    pub fn check_edges(&self) -> Result<()> {
        let r = self.edge_ratio();
        if r < EDGE_LIMIT {
            Ok(())
        } else {
            Err(PdcError::GridTooNarrow {
                edge_ratio: r,
                limit: EDGE_LIMIT,
            })
        }
    }
}

/// Narrowest spectral feature (rad/s): the lossless sinc lobe 2π/(L|Δk′|) or the
/// loss width (α_s + α_i)/|Δk′|, whichever is wider.
pub fn feature_width(spec: &InteractionSpec) -> Result<f64> {
    let slope = delta_k_slope(&spec.dispersion, spec)?.abs();
    let rate = (2.0 * PI / spec.length).max(spec.alpha_s + spec.alpha_i);
    Ok(rate / slope)
}

fn grid_with_spacing(center: f64, spacing: f64, n: usize) -> Result<FrequencyGrid> {
    make_grid(center, spacing * (n - 1) as f64 / 2.0, n)
}

/// Smallest grid (spacing fixed at feature/16, n doubling from 256, half-width at
/// least [`MIN_HALF_WIDTH_FEATURES`]) whose edges fall below [`EDGE_LIMIT`].
/// Samples of the previous grid are reused.
pub fn auto_grid(spec: &InteractionSpec, exec: Execution) -> Result<GridEvaluation> {
    let spacing = feature_width(spec)? / SAMPLES_PER_FEATURE;
    let center = spec.signal_center();
    let mut n = AUTO_GRID_START;
    while (n as f64) < 2.0 * MIN_HALF_WIDTH_FEATURES * SAMPLES_PER_FEATURE {
        n *= 2;
    }
    let mut eval = GridEvaluation::new(spec, Arc::new(grid_with_spacing(center, spacing, n)?), exec)?;
    loop {
        let ratio = eval.edge_ratio();
        if ratio < EDGE_LIMIT {
            return Ok(eval);
        }
        if n >= AUTO_GRID_MAX {
            return Err(PdcError::GridTooNarrow {
                edge_ratio: ratio,
                limit: EDGE_LIMIT,
            });
        }
        let grid = Arc::new(grid_with_spacing(center, spacing, 2 * n)?);
        // old sample k sits at new index k + n/2
        let fresh: Vec<usize> = (0..n / 2).chain(n / 2 + n..2 * n).collect();
        let values = try_map(exec, &fresh, |&k| evaluate_point(spec, grid.omega(k)))?;
        let mut points = Vec::with_capacity(2 * n);
        points.extend_from_slice(&values[..n / 2]);
        points.extend_from_slice(&eval.points);
        points.extend_from_slice(&values[n / 2..]);
        eval = GridEvaluation { grid, points };
        n *= 2;
    }
}
