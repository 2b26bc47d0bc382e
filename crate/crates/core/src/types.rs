//! Shared domain types: interaction parameters, frequency grids and sampled curves.
//!
//! Units are SI throughout. Angular frequencies are rad/s; linear frequencies
//! in THz appear only at the material and single-cycle boundary, converted by
//! [`thz_to_omega`] / [`omega_to_thz`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{PdcError, Result};
use crate::linalg::C64;
use crate::materials::MaterialModel;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// The single THz ↔ rad/s conversion point.
pub fn thz_to_omega(nu_thz: f64) -> f64 {
    2.0 * std::f64::consts::PI * nu_thz * 1e12
}

pub fn omega_to_thz(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI * 1e12)
}

/// Product |κ|·L below which the interaction counts as low gain.
pub const LOW_GAIN_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Idler co-propagates with pump and signal: z_in = 0, z_out = L.
    Forward,
    /// Idler counter-propagates: z_in = L, z_out = 0 for the idler.
    Backward,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Forward => f.write_str("forward"),
            Geometry::Backward => f.write_str("backward"),
        }
    }
}

/// Everything that determines the physics of one down-converter.
///
/// `alpha_s` and `alpha_i` are field absorption coefficients (1/m).
#[derive(Debug, Clone)]
pub struct InteractionSpec {
    pub geometry: Geometry,
    pub length: f64,
    pub alpha_s: f64,
    pub alpha_i: f64,
    pub kappa: C64,
    pub dispersion: Arc<MaterialModel>,
    pub pump_omega: f64,
}

impl InteractionSpec {
    pub fn new(
        geometry: Geometry,
        length: f64,
        alpha_s: f64,
        alpha_i: f64,
        kappa: C64,
        dispersion: Arc<MaterialModel>,
        pump_omega: f64,
    ) -> Result<Self> {
        let spec = InteractionSpec {
            geometry,
            length,
            alpha_s,
            alpha_i,
            kappa,
            dispersion,
            pump_omega,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(PdcError::Config(format!(
                "crystal length must be positive, got {}",
                self.length
            )));
        }
        for (name, a) in [("alpha_s", self.alpha_s), ("alpha_i", self.alpha_i)] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(PdcError::Config(format!("{name} must be >= 0, got {a}")));
            }
        }
        if !(self.kappa.re.is_finite() && self.kappa.im.is_finite()) {
            return Err(PdcError::Config("kappa must be finite".into()));
        }
        if !(self.pump_omega.is_finite() && self.pump_omega > 0.0) {
            return Err(PdcError::Config(format!(
                "pump angular frequency must be positive, got {}",
                self.pump_omega
            )));
        }
        Ok(())
    }

    /// |κ|·L < 0.01.
    pub fn is_low_gain(&self) -> bool {
        self.kappa.norm() * self.length < LOW_GAIN_LIMIT
    }

    /// Phase-matched signal angular frequency; the grid centre.
    pub fn signal_center(&self) -> f64 {
        self.dispersion.signal_center(self.pump_omega)
    }

    pub fn with_alpha_s(&self, alpha_s: f64) -> Result<Self> {
        let s = InteractionSpec { alpha_s, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_alpha_i(&self, alpha_i: f64) -> Result<Self> {
        let s = InteractionSpec { alpha_i, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_kappa(&self, kappa: C64) -> Result<Self> {
        let s = InteractionSpec { kappa, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        let s = InteractionSpec { length, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_geometry(&self, geometry: Geometry) -> Self {
        InteractionSpec { geometry, ..self.clone() }
    }
}

/// Uniform grid of detunings ω′ = ω − centre, symmetric about the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    center_omega: f64,
    half_width: f64,
    samples: Vec<f64>,
}

/// Uniform symmetric grid with `n` points spanning `[-half_width, +half_width]`.
///
/// `n` must be a power of two and at least 2.
pub fn make_grid(center: f64, half_width: f64, n: usize) -> Result<FrequencyGrid> {
    if n < 2 || !n.is_power_of_two() {
        return Err(PdcError::Config(format!(
            "grid size must be a power of two >= 2, got {n}"
        )));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(PdcError::Config(format!(
            "grid half width must be positive, got {half_width}"
        )));
    }
    if !center.is_finite() {
        return Err(PdcError::Config("grid centre must be finite".into()));
    }
    let step = 2.0 * half_width / (n - 1) as f64;
    // Mirror the upper half onto the lower so the grid is exactly symmetric.
    let mut samples = vec![0.0; n];
    for k in 0..n / 2 {
        let x = half_width - step * k as f64;
        samples[n - 1 - k] = x;
        samples[k] = -x;
    }
    Ok(FrequencyGrid {
        center_omega: center,
        half_width,
        samples,
    })
}

impl FrequencyGrid {
    pub fn center(&self) -> f64 {
        self.center_omega
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.samples.len() - 1) as f64
    }

    /// Detunings ω′ (rad/s).
    pub fn detunings(&self) -> &[f64] {
        &self.samples
    }

    /// Absolute angular frequency of sample `k`.
    pub fn omega(&self, k: usize) -> f64 {
        self.center_omega + self.samples[k]
    }

    /// Nearest sample index of a detuning, if it lies on the grid.
    pub fn index_of(&self, detuning: f64) -> Option<usize> {
        let pos = (detuning + self.half_width) / self.spacing();
        let k = pos.round();
        if k < 0.0 || k as usize >= self.samples.len() {
            return None;
        }
        Some(k as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Signal,
    Idler,
}

/// Sampled spectral power density S(ω′) on a frequency grid.
#[derive(Debug, Clone)]
pub struct SpectrumCurve {
    pub grid: Arc<FrequencyGrid>,
    values: Vec<f64>,
    pub label: Label,
}

impl SpectrumCurve {
    pub fn new(grid: Arc<FrequencyGrid>, values: Vec<f64>, label: Label) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PdcError::Config(format!(
                "spectrum has {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(PdcError::Physics(format!(
                "spectral density must be finite and non-negative, got {v} at index {k}"
            )));
        }
        Ok(SpectrumCurve { grid, values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Optional high-resolution re-evaluation of a correlation curve at arbitrary τ.
pub type Refiner = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampled Glauber correlation G²(τ) including the accidental floor R_s·R_i.
#[derive(Clone)]
pub struct CorrelationCurve {
    tau: Vec<f64>,
    values: Vec<f64>,
    pub floor: f64,
    refiner: Option<Refiner>,
}

impl fmt::Debug for CorrelationCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CorrelationCurve")
            .field("n", &self.tau.len())
            .field("floor", &self.floor)
            .field("refinable", &self.refiner.is_some())
            .finish()
    }
}

impl CorrelationCurve {
    pub fn new(tau: Vec<f64>, values: Vec<f64>, floor: f64) -> Result<Self> {
        if tau.len() != values.len() || tau.len() < 2 {
            return Err(PdcError::Config(format!(
                "correlation curve needs matching tau/value arrays of length >= 2 ({} vs {})",
                tau.len(),
                values.len()
            )));
        }
        if !(floor.is_finite() && floor >= 0.0) {
            return Err(PdcError::Physics(format!("accidental floor must be >= 0, got {floor}")));
        }
        if tau.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(PdcError::Physics("correlation curve contains NaN/Inf".into()));
        }
        if tau.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PdcError::Config("tau grid must be strictly increasing".into()));
        }
        Ok(CorrelationCurve {
            tau,
            values,
            floor,
            refiner: None,
        })
    }

    pub fn with_refiner(mut self, refiner: Refiner) -> Self {
        self.refiner = Some(refiner);
        self
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn refiner(&self) -> Option<&Refiner> {
        self.refiner.as_ref()
    }

    /// G²(τ) − floor.
    pub fn correlated(&self) -> Vec<f64> {
        self.values.iter().map(|g| g - self.floor).collect()
    }
}
