//! Dispersion and absorption models.
//!
//! Two dispersion kinds are supported: a linear group-velocity model around a
//! phase-matched centre, and tabulated refractive indices (natural cubic
//! splines through `frequency_THz,refractive_index` CSV files) combined with a
//! quasi-phase-matching grating that cancels the mismatch at a design point.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{PdcError, Result};
use crate::spline::CubicSpline;
use crate::types::{omega_to_thz, thz_to_omega, Geometry, InteractionSpec, SPEED_OF_LIGHT};

/// Environment variable holding extra directories (`:`-separated) searched for index tables.
pub const MATERIAL_PATH_ENV: &str = "PDC_MATERIAL_PATH";

const LINEAR_LN_TOML: &str = include_str!("../materials/linear-ln.toml");
const LN_THZ_TOML: &str = include_str!("../materials/ln-thz.toml");
const LN_E_IR_CSV: &str = include_str!("../materials/ln_e_ir.csv");
const LN_E_THZ_CSV: &str = include_str!("../materials/ln_e_thz.csv");

/// Idler absorption polynomial α(ν) = (c0 + c1 ν + c2 ν²)·scale with ν in THz, result in 1/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionPolynomial {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub scale: f64,
}

impl AbsorptionPolynomial {
    /// THz absorption of lithium niobate.
    pub const LITHIUM_NIOBATE: AbsorptionPolynomial = AbsorptionPolynomial {
        c0: 16.84,
        c1: -27.43,
        c2: 23.51,
        scale: 50.0,
    };

    pub fn eval(&self, nu_thz: f64) -> f64 {
        (self.c0 + self.c1 * nu_thz + self.c2 * nu_thz * nu_thz) * self.scale
    }

    pub fn derivative(&self, nu_thz: f64) -> f64 {
        (self.c1 + 2.0 * self.c2 * nu_thz) * self.scale
    }
}

pub const LN_THZ_RANGE: (f64, f64) = (1.0, 8.0);

/// Lithium-niobate THz field absorption (1/m) for 1 ≤ ν ≤ 8 THz.
pub fn ln_thz_absorption(nu_thz: f64) -> Result<f64> {
    let (lo, hi) = LN_THZ_RANGE;
    if !(nu_thz >= lo && nu_thz <= hi) {
        return Err(PdcError::Domain {
            omega: thz_to_omega(nu_thz),
            min: thz_to_omega(lo),
            max: thz_to_omega(hi),
        });
    }
    Ok(AbsorptionPolynomial::LITHIUM_NIOBATE.eval(nu_thz))
}

/// Refractive index table for one frequency band.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTable {
    pub source: String,
    spline: CubicSpline,
}

impl IndexTable {
    pub fn from_points(source: impl Into<String>, nu_thz: Vec<f64>, index: Vec<f64>) -> Result<Self> {
        if index.iter().any(|n| !(*n >= 1.0)) {
            return Err(PdcError::Config("refractive indices must be >= 1".into()));
        }
        Ok(IndexTable {
            source: source.into(),
            spline: CubicSpline::new(nu_thz, index)?,
        })
    }

    /// Parse a two-column `frequency_THz,refractive_index` CSV; `#` lines are comments.
    pub fn from_csv(source: impl Into<String>, text: &str) -> Result<Self> {
        let source = source.into();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut nu = Vec::new();
        let mut idx = Vec::new();
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| PdcError::Config(format!("{source}: {e}")))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(row as u64 + 2);
            if rec.len() != 2 {
                return Err(PdcError::Config(format!(
                    "{source}:{line}: expected 2 columns, found {}",
                    rec.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| PdcError::Config(format!("{source}:{line}: {e}: {s:?}")))
            };
            nu.push(parse(&rec[0])?);
            idx.push(parse(&rec[1])?);
        }
        Self::from_points(source, nu, idx)
    }

    pub fn range_thz(&self) -> (f64, f64) {
        self.spline.domain()
    }

    pub fn contains(&self, nu_thz: f64) -> bool {
        self.spline.contains(nu_thz)
    }

    /// Index and dn/dν (per THz).
    pub fn index(&self, nu_thz: f64) -> (f64, f64) {
        self.spline.eval(nu_thz)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion {
    /// Δk linear in detuning; group velocities in m/s.
    LinearGV {
        v_s: f64,
        v_i: f64,
        v_p: f64,
        /// Phase-matched signal frequency; `None` means degenerate, ω_p/2.
        signal_omega0: Option<f64>,
        /// Detuning is an envelope variable: no bound from positive frequencies.
        envelope: bool,
    },
    Tabulated {
        tables: Vec<IndexTable>,
        /// Idler frequency at which the grating cancels the mismatch.
        design_idler_thz: f64,
    },
}

/// Signed quasi-phase-matching result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QpmPeriod {
    /// Poling period in metres; `f64::INFINITY` when no poling is needed.
    pub period: f64,
    /// Material mismatch k_p − k_s ∓ k_i (1/m) at the design point.
    pub mismatch: f64,
}

impl QpmPeriod {
    /// First-order period 2π/|Δk|. A negative mismatch is compensated by a grating
    /// vector of the opposite sign; the period itself is always positive.
    pub fn from_mismatch(mismatch: f64) -> Self {
        let period = if mismatch == 0.0 {
            f64::INFINITY
        } else {
            2.0 * std::f64::consts::PI / mismatch.abs()
        };
        QpmPeriod { period, mismatch }
    }

    pub fn needs_poling(&self) -> bool {
        self.period.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub name: String,
    pub dispersion: Dispersion,
    pub absorption: Option<AbsorptionPolynomial>,
    /// Field absorption of the signal, 1/m.
    pub signal_loss: f64,
    /// Validity range of the idler models, THz.
    pub validity_thz: Option<(f64, f64)>,
}

impl MaterialModel {
    /// Linear model with group velocities given as group indices.
    pub fn linear_gv(group_index_s: f64, group_index_i: f64, group_index_p: f64) -> Result<Self> {
        let v = |n: f64| SPEED_OF_LIGHT / n;
        let model = MaterialModel {
            name: "linear-gv".into(),
            dispersion: Dispersion::LinearGV {
                v_s: v(group_index_s),
                v_i: v(group_index_i),
                v_p: v(group_index_p),
                signal_omega0: None,
                envelope: false,
            },
            absorption: None,
            signal_loss: 0.0,
            validity_thz: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// Default generic model: n_g,s = 2.2, n_g,i = 5.1.
    pub fn default_linear() -> Self {
        MaterialModel::from_toml_str(LINEAR_LN_TOML, None).expect("shipped linear model parses")
    }

    /// Shipped periodically poled LN model for an infrared signal and THz idler.
    pub fn ln_thz() -> Self {
        MaterialModel::from_toml_str(LN_THZ_TOML, None).expect("shipped LN model parses")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "linear-ln" | "linear" => Some(Self::default_linear()),
            "ln-thz" => Some(Self::ln_thz()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.dispersion {
            Dispersion::LinearGV { v_s, v_i, v_p, .. } => {
                for (name, v) in [("v_s", v_s), ("v_i", v_i), ("v_p", v_p)] {
                    if !(*v > 0.0 && *v <= SPEED_OF_LIGHT) {
                        return Err(PdcError::Config(format!(
                            "group velocity {name} must lie in (0, c], got {v}"
                        )));
                    }
                }
                if v_s == v_i {
                    return Err(PdcError::Config(
                        "equal signal and idler group velocities make V- undefined".into(),
                    ));
                }
            }
            Dispersion::Tabulated { tables, .. } => {
                if tables.is_empty() {
                    return Err(PdcError::Config("tabulated model without index tables".into()));
                }
            }
        }
        if !(self.signal_loss >= 0.0 && self.signal_loss.is_finite()) {
            return Err(PdcError::Config("signal_loss must be >= 0".into()));
        }
        if let (Some(p), Some((lo, hi))) = (self.absorption, self.validity_thz) {
            if !(lo < hi) {
                return Err(PdcError::Config(format!("empty validity range [{lo}, {hi}] THz")));
            }
            // Quadratic: the minimum over a closed interval is at an end or the vertex.
            let mut candidates = vec![lo, hi];
            if p.c2 != 0.0 {
                let vertex = -p.c1 / (2.0 * p.c2);
                if vertex > lo && vertex < hi {
                    candidates.push(vertex);
                }
            }
            if candidates.iter().any(|&nu| p.eval(nu) < 0.0) {
                return Err(PdcError::Config(format!(
                    "absorption polynomial negative inside [{lo}, {hi}] THz"
                )));
            }
        }
        Ok(())
    }

    fn table_for(&self, nu_thz: f64) -> Option<&IndexTable> {
        match &self.dispersion {
            Dispersion::Tabulated { tables, .. } => tables.iter().find(|t| t.contains(nu_thz)),
            Dispersion::LinearGV { .. } => None,
        }
    }

    /// Refractive index and group index at ν (tabulated models only).
    pub fn index_at(&self, nu_thz: f64) -> Result<(f64, f64)> {
        let t = self.table_for(nu_thz).ok_or_else(|| {
            PdcError::Config(format!("no index table covers {nu_thz} THz"))
        })?;
        let (n, dn) = t.index(nu_thz);
        Ok((n, n + nu_thz * dn))
    }

    /// Wavenumber k = n ω / c.
    fn wavenumber(&self, omega: f64) -> Option<f64> {
        let nu = omega_to_thz(omega);
        self.table_for(nu).map(|t| t.index(nu).0 * omega / SPEED_OF_LIGHT)
    }

    pub fn signal_center(&self, pump_omega: f64) -> f64 {
        match &self.dispersion {
            Dispersion::LinearGV { signal_omega0, .. } => signal_omega0.unwrap_or(pump_omega / 2.0),
            Dispersion::Tabulated { design_idler_thz, .. } => pump_omega - thz_to_omega(*design_idler_thz),
        }
    }

    /// Signal and idler group velocities at the grid centre.
    pub fn group_velocities(&self, pump_omega: f64) -> Result<(f64, f64)> {
        match &self.dispersion {
            Dispersion::LinearGV { v_s, v_i, .. } => Ok((*v_s, *v_i)),
            Dispersion::Tabulated { design_idler_thz, .. } => {
                let nu_s = omega_to_thz(self.signal_center(pump_omega));
                let (_, ng_s) = self.index_at(nu_s)?;
                let (_, ng_i) = self.index_at(*design_idler_thz)?;
                Ok((SPEED_OF_LIGHT / ng_s, SPEED_OF_LIGHT / ng_i))
            }
        }
    }

    /// V− = |1/V_s − 1/V_i|⁻¹ and V+ = |1/V_s + 1/V_i|⁻¹.
    pub fn relative_velocities(&self, pump_omega: f64) -> Result<(f64, f64)> {
        let (vs, vi) = self.group_velocities(pump_omega)?;
        Ok((1.0 / (1.0 / vs - 1.0 / vi).abs(), 1.0 / (1.0 / vs + 1.0 / vi)))
    }

    /// Valid signal angular-frequency range for Δk evaluation.
    pub fn valid_signal_range(&self, pump_omega: f64) -> (f64, f64) {
        match &self.dispersion {
            Dispersion::LinearGV { envelope: true, .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Dispersion::LinearGV { .. } => match self.validity_thz {
                // the validity range constrains the idler
                Some((lo, hi)) => (pump_omega - thz_to_omega(hi), pump_omega - thz_to_omega(lo)),
                None => (0.0, pump_omega),
            },
            Dispersion::Tabulated { tables, .. } => {
                let omega_s0 = self.signal_center(pump_omega);
                let nu_s0 = omega_to_thz(omega_s0);
                let nu_i0 = omega_to_thz(pump_omega - omega_s0);
                let band = |nu: f64| {
                    tables
                        .iter()
                        .find(|t| t.contains(nu))
                        .map(|t| t.range_thz())
                        .unwrap_or((nu, nu))
                };
                let (s_lo, s_hi) = band(nu_s0);
                let (mut i_lo, mut i_hi) = band(nu_i0);
                if let Some((lo, hi)) = self.validity_thz {
                    i_lo = i_lo.max(lo);
                    i_hi = i_hi.min(hi);
                }
                let lo = thz_to_omega(s_lo).max(pump_omega - thz_to_omega(i_hi));
                let hi = thz_to_omega(s_hi).min(pump_omega - thz_to_omega(i_lo));
                (lo, hi)
            }
        }
    }

    /// Idler field absorption (1/m) at ν, from the polynomial when present.
    pub fn idler_absorption(&self, nu_thz: f64) -> Result<f64> {
        let p = self
            .absorption
            .ok_or_else(|| PdcError::Config(format!("material {:?} has no absorption model", self.name)))?;
        if let Some((lo, hi)) = self.validity_thz {
            if !(nu_thz >= lo && nu_thz <= hi) {
                return Err(PdcError::Domain {
                    omega: thz_to_omega(nu_thz),
                    min: thz_to_omega(lo),
                    max: thz_to_omega(hi),
                });
            }
        }
        Ok(p.eval(nu_thz))
    }

    /// Copy of a tabulated model re-targeted at a new idler design frequency.
    pub fn at_idler(&self, nu_thz: f64) -> Result<Self> {
        match &self.dispersion {
            Dispersion::Tabulated { tables, .. } => {
                let m = MaterialModel {
                    dispersion: Dispersion::Tabulated {
                        tables: tables.clone(),
                        design_idler_thz: nu_thz,
                    },
                    ..self.clone()
                };
                m.index_at(nu_thz)?;
                Ok(m)
            }
            Dispersion::LinearGV { .. } => Err(PdcError::Config(
                "retargeting the idler frequency requires tabulated dispersion".into(),
            )),
        }
    }

    /// Linear group-velocity envelope model matching this model's local
    /// dispersion at the grid centre.
    pub fn linearized(&self, pump_omega: f64) -> Result<Self> {
        let (v_s, v_i) = self.group_velocities(pump_omega)?;
        let v_p = match &self.dispersion {
            Dispersion::LinearGV { v_p, .. } => *v_p,
            Dispersion::Tabulated { .. } => {
                SPEED_OF_LIGHT / self.index_at(omega_to_thz(pump_omega))?.1
            }
        };
        Ok(MaterialModel {
            name: format!("{} (linearized)", self.name),
            dispersion: Dispersion::LinearGV {
                v_s,
                v_i,
                v_p,
                signal_omega0: Some(self.signal_center(pump_omega)),
                envelope: true,
            },
            ..self.clone()
        })
    }

    /// Material wavevector mismatch k_p − k_s ∓ k_i at the design point
    /// (− forward, + backward).
    fn material_mismatch(&self, geometry: Geometry, pump_omega: f64, omega_s: f64) -> Option<f64> {
        let kp = self.wavenumber(pump_omega)?;
        let ks = self.wavenumber(omega_s)?;
        let ki = self.wavenumber(pump_omega - omega_s)?;
        Some(match geometry {
            Geometry::Forward => kp - ks - ki,
            Geometry::Backward => kp - ks + ki,
        })
    }
}

/// Phase mismatch Δk(ω) in 1/m at absolute signal angular frequency `omega`.
///
/// Zero at the phase-matched centre for both dispersion kinds; a tabulated model
/// subtracts the grating vector that cancels the mismatch at its design point.
pub fn delta_k(model: &MaterialModel, spec: &InteractionSpec, omega: f64) -> Result<f64> {
    let (lo, hi) = model.valid_signal_range(spec.pump_omega);
    let inside = match &model.dispersion {
        Dispersion::LinearGV { .. } => omega > lo && omega < hi,
        Dispersion::Tabulated { .. } => omega >= lo && omega <= hi,
    };
    if !inside {
        return Err(PdcError::Domain { omega, min: lo, max: hi });
    }
    match &model.dispersion {
        Dispersion::LinearGV { v_s, v_i, .. } => {
            let detuning = omega - model.signal_center(spec.pump_omega);
            Ok(match spec.geometry {
                Geometry::Forward => detuning * (1.0 / v_i - 1.0 / v_s),
                Geometry::Backward => detuning * (-1.0 / v_i - 1.0 / v_s),
            })
        }
        Dispersion::Tabulated { .. } => {
            let omega0 = model.signal_center(spec.pump_omega);
            let out_of_range = || PdcError::Domain { omega, min: lo, max: hi };
            let grating = model
                .material_mismatch(spec.geometry, spec.pump_omega, omega0)
                .ok_or_else(out_of_range)?;
            let mismatch = model
                .material_mismatch(spec.geometry, spec.pump_omega, omega)
                .ok_or_else(out_of_range)?;
            Ok(mismatch - grating)
        }
    }
}

/// dΔk/dω at the grid centre (s/m), from group velocities.
pub fn delta_k_slope(model: &MaterialModel, spec: &InteractionSpec) -> Result<f64> {
    let (vs, vi) = model.group_velocities(spec.pump_omega)?;
    Ok(match spec.geometry {
        Geometry::Forward => 1.0 / vi - 1.0 / vs,
        Geometry::Backward => -1.0 / vi - 1.0 / vs,
    })
}

/// First-order poling period for the forward interaction at the model's design point.
pub fn qpm_period(model: &MaterialModel, spec: &InteractionSpec) -> Result<QpmPeriod> {
    if !matches!(model.dispersion, Dispersion::Tabulated { .. }) {
        return Err(PdcError::Config("poling period requires tabulated dispersion".into()));
    }
    let omega_s = model.signal_center(spec.pump_omega);
    let mismatch = model
        .material_mismatch(spec.geometry, spec.pump_omega, omega_s)
        .ok_or_else(|| {
            PdcError::Config(format!(
                "index tables do not cover pump {:.3} THz, signal {:.3} THz and idler {:.3} THz",
                omega_to_thz(spec.pump_omega),
                omega_to_thz(omega_s),
                omega_to_thz(spec.pump_omega - omega_s)
            ))
        })?;
    Ok(QpmPeriod::from_mismatch(mismatch))
}

// ---------------------------------------------------------------------------
// Config files

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidityToml {
    nu_min_thz: f64,
    nu_max_thz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialToml {
    name: Option<String>,
    kind: String,
    group_index_s: Option<f64>,
    group_index_i: Option<f64>,
    group_index_p: Option<f64>,
    v_s: Option<f64>,
    v_i: Option<f64>,
    v_p: Option<f64>,
    tables: Option<Vec<String>>,
    design_idler_thz: Option<f64>,
    #[serde(default)]
    signal_loss: f64,
    #[serde(default)]
    absorption_is_intensity: bool,
    absorption: Option<AbsorptionPolynomial>,
    validity: Option<ValidityToml>,
}

fn search_dirs(base: Option<&Path>) -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(b) = base {
        dirs.push(b.to_path_buf());
    }
    if let Ok(p) = std::env::var(MATERIAL_PATH_ENV) {
        dirs.extend(std::env::split_paths(&p));
    }
    dirs
}

fn load_table(name: &str, base: Option<&Path>) -> Result<IndexTable> {
    let path = Path::new(name);
    if path.is_absolute() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PdcError::Config(format!("cannot read index table {name}: {e}")))?;
        return IndexTable::from_csv(name, &text);
    }
    for dir in search_dirs(base) {
        let candidate = dir.join(path);
        if candidate.is_file() {
            let text = std::fs::read_to_string(&candidate).map_err(|e| {
                PdcError::Config(format!("cannot read index table {}: {e}", candidate.display()))
            })?;
            return IndexTable::from_csv(candidate.display().to_string(), &text);
        }
    }
    match name {
        "ln_e_ir.csv" => IndexTable::from_csv(name, LN_E_IR_CSV),
        "ln_e_thz.csv" => IndexTable::from_csv(name, LN_E_THZ_CSV),
        _ => Err(PdcError::Config(format!(
            "index table {name:?} not found (searched the material directory and ${MATERIAL_PATH_ENV})"
        ))),
    }
}

impl MaterialModel {
    /// Parse a material TOML document; relative table paths resolve against
    /// `base_dir`, then `PDC_MATERIAL_PATH`, then the shipped tables.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw: MaterialToml =
            toml::from_str(text).map_err(|e| PdcError::Config(format!("material file: {e}")))?;
        let intensity_factor = if raw.absorption_is_intensity { 0.5 } else { 1.0 };
        let velocity = |v: Option<f64>, n: Option<f64>, which: &str| -> Result<f64> {
            match (v, n) {
                (Some(v), None) => Ok(v),
                (None, Some(n)) => Ok(SPEED_OF_LIGHT / n),
                (None, None) => Err(PdcError::Config(format!(
                    "linear-gv material needs v_{which} or group_index_{which}"
                ))),
                (Some(_), Some(_)) => Err(PdcError::Config(format!(
                    "give either v_{which} or group_index_{which}, not both"
                ))),
            }
        };
        let dispersion = match raw.kind.as_str() {
            "linear-gv" => {
                let v_s = velocity(raw.v_s, raw.group_index_s, "s")?;
                let v_i = velocity(raw.v_i, raw.group_index_i, "i")?;
                let v_p = match (raw.v_p, raw.group_index_p) {
                    (None, None) => v_s,
                    (v, n) => velocity(v, n, "p")?,
                };
                Dispersion::LinearGV {
                    v_s,
                    v_i,
                    v_p,
                    signal_omega0: None,
                    envelope: false,
                }
            }
            "tabulated" => {
                let names = raw
                    .tables
                    .ok_or_else(|| PdcError::Config("tabulated material needs `tables`".into()))?;
                let tables = names
                    .iter()
                    .map(|n| load_table(n, base_dir))
                    .collect::<Result<Vec<_>>>()?;
                let design_idler_thz = raw.design_idler_thz.ok_or_else(|| {
                    PdcError::Config("tabulated material needs `design_idler_thz`".into())
                })?;
                Dispersion::Tabulated {
                    tables,
                    design_idler_thz,
                }
            }
            other => {
                return Err(PdcError::Config(format!(
                    "unknown material kind {other:?} (expected \"linear-gv\" or \"tabulated\")"
                )))
            }
        };
        let absorption = raw.absorption.map(|p| AbsorptionPolynomial {
            scale: p.scale * intensity_factor,
            ..p
        });
        let model = MaterialModel {
            name: raw.name.unwrap_or_else(|| raw.kind.clone()),
            dispersion,
            absorption,
            signal_loss: raw.signal_loss * intensity_factor,
            validity_thz: raw.validity.map(|v| (v.nu_min_thz, v.nu_max_thz)),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PdcError::Config(format!("cannot read material {}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent())
    }
}
