//! Scenario files, the shipped presets, and the runs behind each command.
//!
//! A scenario is TOML. Presets are embedded; a file given alongside a preset
//! is merged over it key by key. Every output starts with the fully resolved
//! scenario so a result can be regenerated from the file alone.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{PdcError, Result};
use crate::linalg::C64;
use crate::materials::{MaterialModel, MATERIAL_PATH_ENV};
use crate::observables::{
    auto_grid, coincidence_rate, floor_deviation, fwhm, parseval_residual, spectral_bandwidth, GridEvaluation,
    TauGrid,
};
use crate::oracle::{dense_quadrature, ode_propagator, series_expm, OracleCost, OracleKernel, OracleReport};
use crate::parallel::{try_map, Execution};
use crate::single_cycle::{find_single_cycle, fwhm_vs_frequency, Method};
use crate::transfer::{build_coupling_matrix, fast_moments, propagator, transfer};
use crate::types::{make_grid, Geometry, InteractionSpec, Label, SPEED_OF_LIGHT};

pub const PRESET_NAMES: [&str; 5] = ["fig3", "fig4-forward", "fig4-backward", "fig5", "fig6"];

/// Parameters a sweep may vary. `alpha` sets both absorptions.
pub const SWEEP_PARAMETERS: [&str; 5] = ["alpha_s", "alpha_i", "alpha", "length", "kappa"];

pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig3" => include_str!("../presets/fig3.toml"),
        "fig4-forward" => include_str!("../presets/fig4-forward.toml"),
        "fig4-backward" => include_str!("../presets/fig4-backward.toml"),
        "fig5" => include_str!("../presets/fig5.toml"),
        "fig6" => include_str!("../presets/fig6.toml"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub interaction: InteractionConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_cycle: Option<SingleCycleConfig>,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Directory that relative material paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
    /// m
    pub length: f64,
    /// 1/m
    #[serde(default)]
    pub alpha_s: f64,
    /// 1/m
    #[serde(default)]
    pub alpha_i: f64,
    /// |κ|, 1/m
    pub kappa: f64,
    /// arg κ, rad
    #[serde(default)]
    pub kappa_phase: f64,
    /// m
    pub pump_wavelength: f64,
}

fn default_geometry() -> Geometry {
    Geometry::Forward
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig {
            builtin: Some("linear-ln".into()),
            file: None,
        }
    }
}

/// Both fields or neither: a fixed grid of `points` samples over ±`half_width`
/// rad/s, or the adaptive grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleCycleConfig {
    /// THz
    pub bracket: [f64; 2],
    /// THz
    pub frequencies: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::HighLossApprox, Method::FullG2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Signal detunings, rad/s.
    #[serde(default = "default_detunings")]
    pub detunings: Vec<f64>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default = "default_panels")]
    pub panels: usize,
    /// Largest relative deviation accepted before the run reports failure.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_detunings() -> Vec<f64> {
    vec![0.0, 1e11, 1e12]
}
fn default_steps() -> usize {
    10_000
}
fn default_terms() -> usize {
    crate::oracle::DEFAULT_SERIES_TERMS
}
fn default_panels() -> usize {
    10_000
}
fn default_tolerance() -> f64 {
    1e-6
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            detunings: default_detunings(),
            steps: default_steps(),
            terms: default_terms(),
            panels: default_panels(),
            tolerance: default_tolerance(),
        }
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn parse_error(origin: &str, e: impl std::fmt::Display) -> PdcError {
    PdcError::Config(format!("{origin}: {}", e.to_string().trim_end()))
}

impl Scenario {
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut sc: Scenario = toml::from_str(text).map_err(|e| parse_error("scenario", e))?;
        sc.base_dir = base_dir.map(Path::to_path_buf);
        sc.validate()?;
        Ok(sc)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_text(name).ok_or_else(|| {
            PdcError::Config(format!("unknown preset {name:?} (expected one of {})", PRESET_NAMES.join(", ")))
        })?;
        Self::from_toml_str(text, None)
    }

    /// Preset, file, or the file merged over the preset.
    pub fn load(preset: Option<&str>, file: Option<&Path>) -> Result<Self> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| PdcError::Config(format!("cannot read scenario {}: {e}", p.display())))
        };
        let base_dir = file.and_then(Path::parent).map(Path::to_path_buf);
        match (preset, file) {
            (None, None) => Err(PdcError::Config("give a scenario file or a preset".into())),
            (Some(name), None) => Self::preset(name),
            (None, Some(path)) => Self::from_toml_str(&read(path)?, base_dir.as_deref()),
            (Some(name), Some(path)) => {
                let origin = path.display().to_string();
                let base = preset_text(name).ok_or_else(|| PdcError::Config(format!("unknown preset {name:?}")))?;
                let mut table: toml::Table = toml::from_str(base).map_err(|e| parse_error(name, e))?;
                let over: toml::Table = toml::from_str(&read(path)?).map_err(|e| parse_error(&origin, e))?;
                merge(&mut table, over);
                let mut sc: Scenario =
                    toml::Value::Table(table).try_into().map_err(|e| parse_error(&origin, e))?;
                sc.base_dir = base_dir;
                sc.validate()?;
                Ok(sc)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let i = &self.interaction;
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(PdcError::Config(format!("interaction.{what} must be finite")))
            }
        };
        for (v, what) in [
            (i.length, "length"),
            (i.alpha_s, "alpha_s"),
            (i.alpha_i, "alpha_i"),
            (i.kappa, "kappa"),
            (i.kappa_phase, "kappa_phase"),
            (i.pump_wavelength, "pump_wavelength"),
        ] {
            finite(v, what)?;
        }
        if !(i.pump_wavelength > 0.0) {
            return Err(PdcError::Config("interaction.pump_wavelength must be > 0".into()));
        }
        if !(i.kappa >= 0.0) {
            return Err(PdcError::Config("interaction.kappa is |κ| and must be >= 0".into()));
        }
        match (&self.material.builtin, &self.material.file) {
            (Some(_), Some(_)) => {
                return Err(PdcError::Config("material: give either `builtin` or `file`, not both".into()))
            }
            (None, None) => return Err(PdcError::Config("material: give `builtin` or `file`".into())),
            _ => {}
        }
        match (self.grid.half_width, self.grid.points) {
            (None, None) => {}
            (Some(hw), Some(_)) if hw > 0.0 && hw.is_finite() => {}
            (Some(_), Some(_)) => return Err(PdcError::Config("grid.half_width must be finite and > 0".into())),
            _ => return Err(PdcError::Config("grid: give both `half_width` and `points`, or neither".into())),
        }
        if let Some(sweep) = &self.sweep {
            if !SWEEP_PARAMETERS.contains(&sweep.parameter.as_str()) {
                return Err(PdcError::Config(format!(
                    "unknown sweep parameter {:?} (expected one of {})",
                    sweep.parameter,
                    SWEEP_PARAMETERS.join(", ")
                )));
            }
            if sweep.values.is_empty() {
                return Err(PdcError::Config("sweep.values is empty".into()));
            }
            let positive = sweep.parameter == "length";
            for &v in &sweep.values {
                if !v.is_finite() || v < 0.0 || (positive && v == 0.0) {
                    return Err(PdcError::Config(format!(
                        "sweep value {v} out of range for {}",
                        sweep.parameter
                    )));
                }
            }
        }
        if let Some(sc) = &self.single_cycle {
            if sc.frequencies.is_empty() {
                return Err(PdcError::Config("single_cycle.frequencies is empty".into()));
            }
            if sc.methods.is_empty() {
                return Err(PdcError::Config("single_cycle.methods is empty".into()));
            }
            if sc.frequencies.iter().chain(&sc.bracket).any(|v| !v.is_finite()) {
                return Err(PdcError::Config("single_cycle frequencies must be finite".into()));
            }
        }
        let o = &self.oracle;
        if o.detunings.is_empty() || o.detunings.iter().any(|d| !d.is_finite()) {
            return Err(PdcError::Config("oracle.detunings must be a non-empty list of finite values".into()));
        }
        if !(o.tolerance > 0.0) {
            return Err(PdcError::Config("oracle.tolerance must be > 0".into()));
        }
        Ok(())
    }

    pub fn material(&self) -> Result<MaterialModel> {
        if let Some(name) = &self.material.builtin {
            return MaterialModel::builtin(name)
                .ok_or_else(|| PdcError::Config(format!("unknown builtin material {name:?}")));
        }
        let file = self.material.file.as_ref().expect("validated");
        if file.is_absolute() {
            return MaterialModel::from_file(file);
        }
        let mut dirs: Vec<PathBuf> = self.base_dir.iter().cloned().collect();
        if let Ok(p) = std::env::var(MATERIAL_PATH_ENV) {
            dirs.extend(std::env::split_paths(&p));
        }
        match dirs.iter().map(|d| d.join(file)).find(|p| p.is_file()) {
            Some(p) => MaterialModel::from_file(&p),
            None => Err(PdcError::Config(format!(
                "material file {} not found (searched the scenario directory and ${MATERIAL_PATH_ENV})",
                file.display()
            ))),
        }
    }

    pub fn pump_omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.interaction.pump_wavelength
    }

    pub fn base_spec(&self) -> Result<InteractionSpec> {
        let i = &self.interaction;
        InteractionSpec::new(
            i.geometry,
            i.length,
            i.alpha_s,
            i.alpha_i,
            C64::from_polar(i.kappa, i.kappa_phase),
            Arc::new(self.material()?),
            self.pump_omega(),
        )
        .map_err(|e| match e {
            PdcError::Config(m) => PdcError::Config(format!("interaction: {m}")),
            other => other,
        })
    }

    /// One spec per sweep value; a single unlabelled point without a sweep.
    pub fn points(&self) -> Result<Vec<(Option<f64>, InteractionSpec)>> {
        let base = self.base_spec()?;
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(None, base)]);
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let spec = match sweep.parameter.as_str() {
                    "alpha_s" => base.with_alpha_s(v)?,
                    "alpha_i" => base.with_alpha_i(v)?,
                    "alpha" => base.with_alpha_s(v)?.with_alpha_i(v)?,
                    "length" => base.with_length(v)?,
                    "kappa" => base.with_kappa(C64::from_polar(v, self.interaction.kappa_phase))?,
                    _ => unreachable!("validated"),
                };
                Ok((Some(v), spec))
            })
            .collect()
    }

    pub fn evaluate(&self, spec: &InteractionSpec, exec: Execution) -> Result<GridEvaluation> {
        match (self.grid.half_width, self.grid.points) {
            (Some(hw), Some(n)) => {
                let grid = Arc::new(make_grid(spec.signal_center(), hw, n)?);
                GridEvaluation::new(spec, grid, exec)
            }
            _ => auto_grid(spec, exec),
        }
    }

    fn sweep_column(&self) -> Option<&str> {
        self.sweep.as_ref().map(|s| s.parameter.as_str())
    }

    /// `# `-prefixed copy of the resolved scenario.
    pub fn provenance(&self, command: &str) -> Result<String> {
        let body = toml::to_string(self).map_err(|e| PdcError::Config(format!("cannot serialise scenario: {e}")))?;
        let mut out = format!("# pdc-core {} {command}\n", env!("CARGO_PKG_VERSION"));
        for line in body.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        Ok(out)
    }

    fn provenance_json(&self, command: &str) -> Result<Value> {
        Ok(json!({
            "generator": format!("pdc-core {}", env!("CARGO_PKG_VERSION")),
            "command": command,
            "scenario": serde_json::to_value(self).map_err(|e| PdcError::Config(e.to_string()))?,
        }))
    }
}

/// Files written by a run and its JSON summary.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> PdcError {
    PdcError::Io(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, provenance: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(provenance.as_bytes()).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn prepare(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| io_error(out, e))
}

fn with_sweep(value: Option<f64>, rest: impl IntoIterator<Item = f64>) -> Vec<f64> {
    value.into_iter().chain(rest).collect()
}

fn header<'a>(sweep: Option<&'a str>, rest: &[&'a str]) -> Vec<&'a str> {
    sweep.into_iter().chain(rest.iter().copied()).collect()
}

/// Signal and idler spectra with rates and bandwidths per sweep value.
pub fn run_spectrum(sc: &Scenario, out: &Path, exec: Execution) -> Result<RunReport> {
    let points = sc.points()?;
    let evals = try_map(exec, &points, |(_, spec)| sc.evaluate(spec, exec))?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for ((value, _), eval) in points.iter().zip(&evals) {
        let rates = eval.rates()?;
        let s = eval.spectrum(Label::Signal)?;
        let i = eval.spectrum(Label::Idler)?;
        let bandwidth = |c| if rates.r_s > 0.0 { spectral_bandwidth(c).map(Some) } else { Ok(None) };
        results.push(json!({
            "sweep_value": value,
            "r_s": rates.r_s,
            "r_i": rates.r_i,
            "parametric_s": rates.parametric_s,
            "langevin_s": rates.langevin_s,
            "parametric_i": rates.parametric_i,
            "langevin_i": rates.langevin_i,
            "bandwidth_signal_rad_s": bandwidth(&s)?,
            "bandwidth_idler_rad_s": bandwidth(&i)?,
            "grid_points": eval.grid.len(),
        }));
        for (k, d) in eval.grid.detunings().iter().enumerate() {
            rows.push(with_sweep(*value, [*d, s.values()[k], i.values()[k]]));
        }
    }
    prepare(out)?;
    let csv_path = out.join(format!("{}-spectrum.csv", sc.name));
    write_csv(
        &csv_path,
        &sc.provenance("spectrum")?,
        &header(sc.sweep_column(), &["detuning_rad_s", "S_signal", "S_idler"]),
        &rows,
    )?;
    let mut summary = sc.provenance_json("spectrum")?;
    summary["results"] = Value::Array(results);
    let json_path = out.join(format!("{}-spectrum.json", sc.name));
    write_json(&json_path, &summary)?;
    Ok(RunReport {
        files: vec![csv_path, json_path],
        summary,
    })
}

/// Glauber correlation with R_c, FWHM and transform checks per sweep value.
pub fn run_correlation(sc: &Scenario, out: &Path, exec: Execution) -> Result<RunReport> {
    let points = sc.points()?;
    let computed = try_map(exec, &points, |(_, spec)| {
        let eval = sc.evaluate(spec, exec)?;
        let curve = eval.correlation(spec, &TauGrid::Conjugate, exec)?;
        Ok((eval, curve))
    })?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for ((value, spec), (eval, curve)) in points.iter().zip(&computed) {
        let rates = eval.rates()?;
        let rc = coincidence_rate(curve);
        let width = if rc > 0.0 { Some(fwhm(curve)?) } else { None };
        let parseval = if rc > 0.0 { Some(parseval_residual(spec, eval, curve)?) } else { None };
        results.push(json!({
            "sweep_value": value,
            "fwhm_s": width,
            "r_c": rc,
            "floor": curve.floor,
            "r_s": rates.r_s,
            "r_i": rates.r_i,
            "parseval_residual": parseval,
            "floor_deviation": floor_deviation(spec, curve)?,
            "grid_points": eval.grid.len(),
        }));
        for (t, g) in curve.tau().iter().zip(curve.values()) {
            rows.push(with_sweep(*value, [*t, *g, curve.floor]));
        }
    }
    prepare(out)?;
    let csv_path = out.join(format!("{}-correlation.csv", sc.name));
    write_csv(
        &csv_path,
        &sc.provenance("correlation")?,
        &header(sc.sweep_column(), &["tau_s", "g2", "floor"]),
        &rows,
    )?;
    let mut summary = sc.provenance_json("correlation")?;
    summary["results"] = Value::Array(results);
    let json_path = out.join(format!("{}-correlation.json", sc.name));
    write_json(&json_path, &summary)?;
    Ok(RunReport {
        files: vec![csv_path, json_path],
        summary,
    })
}

/// FWHM(ν) for each method and the single-cycle root.
pub fn run_single_cycle(sc: &Scenario, out: &Path, exec: Execution) -> Result<RunReport> {
    let cfg = sc
        .single_cycle
        .as_ref()
        .ok_or_else(|| PdcError::Config("scenario has no [single_cycle] section".into()))?;
    let spec = sc.base_spec()?;
    let model = sc.material()?;
    let curves = cfg
        .methods
        .iter()
        .map(|&m| try_map(exec, &cfg.frequencies, |&nu| fwhm_vs_frequency(&spec, &model, nu, m)))
        .collect::<Result<Vec<_>>>()?;
    let roots = cfg
        .methods
        .iter()
        .map(|&m| find_single_cycle(&spec, &model, (cfg.bracket[0], cfg.bracket[1]), m))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = cfg
        .frequencies
        .iter()
        .enumerate()
        .map(|(k, &nu)| {
            let mut row = vec![nu, 1e-12 / nu];
            row.extend(curves.iter().map(|c| c[k]));
            row
        })
        .collect();
    let names: Vec<String> = cfg.methods.iter().map(|m| format!("fwhm_{}_s", m.to_string().replace('-', "_"))).collect();
    let mut cols = vec!["nu_thz", "one_over_nu_s"];
    cols.extend(names.iter().map(String::as_str));
    prepare(out)?;
    let csv_path = out.join(format!("{}-single-cycle.csv", sc.name));
    write_csv(&csv_path, &sc.provenance("single-cycle")?, &cols, &rows)?;
    let mut summary = sc.provenance_json("single-cycle")?;
    summary["results"] = serde_json::to_value(&roots).map_err(|e| PdcError::Config(e.to_string()))?;
    let json_path = out.join(format!("{}-single-cycle.json", sc.name));
    write_json(&json_path, &summary)?;
    Ok(RunReport {
        files: vec![csv_path, json_path],
        summary,
    })
}

/// Fast propagator, transfer coefficients and Langevin moments against the
/// brute-force references.
pub fn oracle_reports(spec: &InteractionSpec, cfg: &OracleConfig) -> Result<Vec<OracleReport>> {
    let mut reports = Vec::new();
    for &d in &cfg.detunings {
        let omega = spec.signal_center() + d;
        let cm = build_coupling_matrix(spec, omega)?;
        let tag = |q: &str| format!("{q} @ {d:e} rad/s");
        let fast = propagator(&cm, spec.length)?;
        let ode = ode_propagator(&cm, spec.length, cfg.steps)?;
        reports.push(OracleReport::for_matrix(tag("propagator/ode"), &fast, &ode, OracleCost::Steps(cfg.steps)));
        let series = series_expm(&cm.m, spec.length, cfg.terms)?;
        reports.push(OracleReport::for_matrix(tag("propagator/series"), &fast, &series, OracleCost::Terms(cfg.terms)));
        let ts = transfer(spec, omega)?;
        let kernel = OracleKernel::new(&cm, spec, cfg.terms)?;
        let coeffs = kernel.coefficients()?;
        for (name, fast, slow) in [("a", ts.a, coeffs[0]), ("b", ts.b, coeffs[1]), ("c", ts.c, coeffs[2]), ("d", ts.d, coeffs[3])] {
            reports.push(OracleReport::for_complex(tag(&format!("coefficient/{name}")), fast, slow, OracleCost::Terms(cfg.terms)));
        }
        let m = fast_moments(&ts)?;
        let panels = OracleCost::Panels(cfg.panels);
        let integral = |f: &dyn Fn([C64; 4]) -> C64| dense_quadrature(|z| f(kernel.eval(z)), spec.length, cfg.panels);
        let ff = integral(&|k| C64::new(k[1].norm_sqr(), 0.0))?;
        let gg = integral(&|k| C64::new(k[2].norm_sqr(), 0.0))?;
        let ee = integral(&|k| C64::new(k[0].norm_sqr(), 0.0))?;
        let hh = integral(&|k| C64::new(k[3].norm_sqr(), 0.0))?;
        let fh = integral(&|k| k[1].conj() * k[3])?;
        reports.push(OracleReport::new(tag("moment/ff"), vec![m.ff], vec![ff.re], panels));
        reports.push(OracleReport::new(tag("moment/gg"), vec![m.gg], vec![gg.re], panels));
        reports.push(OracleReport::new(tag("moment/ee"), vec![m.ee], vec![ee.re], panels));
        reports.push(OracleReport::new(tag("moment/hh"), vec![m.hh], vec![hh.re], panels));
        reports.push(OracleReport::for_complex(tag("moment/fh"), m.fh, fh, panels));
    }
    Ok(reports)
}

/// Oracle comparisons per sweep value. Files are written before a deviation
/// above tolerance is reported as an error.
pub fn run_oracle(sc: &Scenario, out: &Path, exec: Execution) -> Result<RunReport> {
    let points = sc.points()?;
    let per_point = try_map(exec, &points, |(_, spec)| oracle_reports(spec, &sc.oracle))?;
    let mut results = Vec::new();
    let mut worst: Option<&OracleReport> = None;
    for ((value, _), reports) in points.iter().zip(&per_point) {
        for r in reports {
            if worst.map_or(true, |w| r.rel_deviation > w.rel_deviation) {
                worst = Some(r);
            }
        }
        results.push(json!({
            "sweep_value": value,
            "reports": serde_json::to_value(reports).map_err(|e| PdcError::Config(e.to_string()))?,
        }));
    }
    prepare(out)?;
    let mut summary = sc.provenance_json("oracle")?;
    summary["tolerance"] = json!(sc.oracle.tolerance);
    summary["max_rel_deviation"] = json!(worst.map(|w| w.rel_deviation));
    summary["results"] = Value::Array(results);
    let json_path = out.join(format!("{}-oracle.json", sc.name));
    write_json(&json_path, &summary)?;
    if let Some(w) = worst {
        if w.rel_deviation > sc.oracle.tolerance {
            return Err(PdcError::OracleMismatch {
                quantity: w.quantity.clone(),
                rel_deviation: w.rel_deviation,
                tolerance: sc.oracle.tolerance,
            });
        }
    }
    Ok(RunReport {
        files: vec![json_path],
        summary,
    })
}
