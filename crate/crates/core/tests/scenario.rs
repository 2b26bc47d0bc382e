use std::fs;
use std::path::Path;

use pdc_core::parallel::Execution;
use pdc_core::scenario::*;
use pdc_core::PdcError;

const SMALL: &str = r#"
name = "small"

[interaction]
geometry = "forward"
length = 0.01
alpha_i = 100.0
kappa = 0.1
pump_wavelength = 1.064e-6

[grid]
half_width = 2.0e13
points = 4096
"#;

fn config_message(r: Result<impl std::fmt::Debug, PdcError>) -> String {
    match r {
        Err(PdcError::Config(m)) => m,
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn presets_parse() {
    for name in PRESET_NAMES {
        let sc = Scenario::preset(name).unwrap();
        assert_eq!(sc.name, name);
        assert_eq!(sc.interaction.length, 0.01);
    }
    let fig3 = Scenario::preset("fig3").unwrap();
    let alphas: Vec<f64> = fig3.points().unwrap().iter().map(|(_, s)| s.alpha_i).collect();
    assert_eq!(alphas, vec![0.0005, 5.0, 50.0, 500.0]);
    let fig6 = Scenario::preset("fig6").unwrap();
    assert!(fig6.points().unwrap().iter().all(|(_, s)| s.alpha_s == s.alpha_i));
}

#[test]
fn unknown_preset() {
    let m = config_message(Scenario::preset("fig7"));
    assert!(m.contains("fig7"));
}

#[test]
fn unknown_sweep_parameter_is_named() {
    let text = format!("{SMALL}\n[sweep]\nparameter = \"temperature\"\nvalues = [1.0]\n");
    let m = config_message(Scenario::from_toml_str(&text, None));
    assert!(m.contains("temperature"), "{m}");
}

#[test]
fn unknown_key_is_named() {
    let text = SMALL.replace("alpha_i = 100.0", "alpha_idler = 100.0");
    let m = config_message(Scenario::from_toml_str(&text, None));
    assert!(m.contains("alpha_idler"), "{m}");
}

#[test]
fn syntax_errors_carry_line_numbers() {
    let text = SMALL.replace("kappa = 0.1", "kappa = = 0.1");
    let m = config_message(Scenario::from_toml_str(&text, None));
    assert!(m.contains("line 8"), "{m}");
}

#[test]
fn empty_frequency_list() {
    let text = format!("{SMALL}\n[single_cycle]\nbracket = [1.0, 8.0]\nfrequencies = []\n");
    let m = config_message(Scenario::from_toml_str(&text, None));
    assert!(m.contains("frequencies"), "{m}");
}

#[test]
fn half_specified_grid() {
    let text = SMALL.replace("points = 4096", "");
    config_message(Scenario::from_toml_str(&text, None));
}

#[test]
fn file_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("over.toml");
    fs::write(&path, "[interaction]\nkappa = 0.05\n[sweep]\nvalues = [10.0, 20.0]\n").unwrap();
    let sc = Scenario::load(Some("fig4-forward"), Some(&path)).unwrap();
    assert_eq!(sc.interaction.kappa, 0.05);
    assert_eq!(sc.interaction.length, 0.01);
    assert_eq!(sc.sweep.as_ref().unwrap().parameter, "alpha_i");
    assert_eq!(sc.sweep.as_ref().unwrap().values, vec![10.0, 20.0]);
}

#[test]
fn material_file_found_through_search_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("slow-idler.toml"),
        "kind = \"linear-gv\"\ngroup_index_s = 2.0\ngroup_index_i = 6.0\n",
    )
    .unwrap();
    let text = format!("{SMALL}\n[material]\nfile = \"slow-idler.toml\"\n");
    let sc = Scenario::from_toml_str(&text, None).unwrap();
    assert!(sc.material().is_err());
    std::env::set_var("PDC_MATERIAL_PATH", dir.path());
    let model = sc.material().unwrap();
    std::env::remove_var("PDC_MATERIAL_PATH");
    assert_eq!(model.name, "linear-gv");
    let local = Scenario::from_toml_str(&text, Some(dir.path())).unwrap();
    assert!(local.material().is_ok());
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn outputs_carry_provenance() {
    let sc = Scenario::from_toml_str(SMALL, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_correlation(&sc, dir.path(), Execution::Sequential).unwrap();
    let csv = read(&report.files[0]);
    assert!(csv.starts_with("# pdc-core"));
    assert!(csv.contains("# alpha_i = 100.0"));
    let first_data = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(first_data, "tau_s,g2,floor");
    let json: serde_json::Value = serde_json::from_str(&read(&report.files[1])).unwrap();
    assert_eq!(json["scenario"]["interaction"]["alpha_i"], 100.0);
    assert_eq!(json["results"].as_array().unwrap().len(), 1);
    // the embedded copy regenerates the same run
    let body: String = csv
        .lines()
        .skip(1)
        .take_while(|l| l.starts_with('#'))
        .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
        .collect();
    assert_eq!(Scenario::from_toml_str(&body, None).unwrap(), sc);
}

#[test]
fn dark_scenario_runs() {
    let text = SMALL.replace("kappa = 0.1", "kappa = 0.0");
    let sc = Scenario::from_toml_str(&text, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_spectrum(&sc, dir.path(), Execution::Sequential).unwrap();
    assert_eq!(report.summary["results"][0]["r_s"], 0.0);
    let csv = read(&report.files[0]);
    for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((cols[1], cols[2]), (0.0, 0.0));
    }
}

#[test]
fn outputs_do_not_depend_on_execution() {
    let text = format!("{SMALL}\n[sweep]\nparameter = \"alpha\"\nvalues = [0.0, 50.0, 300.0]\n");
    let sc = Scenario::from_toml_str(&text, None).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_correlation(&sc, a.path(), Execution::Sequential).unwrap();
    let rb = run_correlation(&sc, b.path(), Execution::Parallel).unwrap();
    for (x, y) in ra.files.iter().zip(&rb.files) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn oracle_run_checks_tolerance() {
    let sc = Scenario::from_toml_str(SMALL, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_oracle(&sc, dir.path(), Execution::Sequential).unwrap();
    assert!(report.summary["max_rel_deviation"].as_f64().unwrap() < 1e-6);
    let tight = Scenario::from_toml_str(&format!("{SMALL}\n[oracle]\ntolerance = 1e-300\n"), None).unwrap();
    let err = run_oracle(&tight, dir.path(), Execution::Sequential).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(dir.path().join("small-oracle.json").is_file());
}

#[test]
fn single_cycle_bracket_error_reports_both_ends() {
    let text = r#"
name = "narrow"
[interaction]
length = 0.01
kappa = 0.1
pump_wavelength = 1.064e-6
[material]
builtin = "ln-thz"
[single_cycle]
bracket = [1.0, 2.0]
frequencies = [1.0, 2.0]
methods = ["high-loss-approx"]
"#;
    let sc = Scenario::from_toml_str(text, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    match run_single_cycle(&sc, dir.path(), Execution::Sequential) {
        Err(e @ PdcError::Bracket { .. }) => {
            assert_eq!(e.exit_code(), 2);
            let m = e.to_string();
            assert!(m.contains("h(lo)") && m.contains("h(hi)"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn full_method_curve_falls_with_frequency() {
    let text = r#"
name = "low-band"
[interaction]
length = 0.01
kappa = 0.1
pump_wavelength = 1.064e-6
[material]
builtin = "ln-thz"
[single_cycle]
bracket = [1.0, 8.0]
frequencies = [1.0, 1.25, 1.5, 1.75, 2.0]
methods = ["full-g2"]
"#;
    let sc = Scenario::from_toml_str(text, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_single_cycle(&sc, dir.path(), Execution::default()).unwrap();
    let csv = read(&report.files[0]);
    let widths: Vec<f64> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(widths.len(), 5);
    assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
}
