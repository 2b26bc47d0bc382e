use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::linalg::C64;
use crate::materials::{delta_k, MaterialModel};
use crate::parallel::Execution;
use crate::types::{make_grid, Geometry, InteractionSpec, Label, SPEED_OF_LIGHT};

const L: f64 = 0.01;

fn pump() -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 1.064e-6
}

fn setup(geometry: Geometry, alpha_s: f64, alpha_i: f64, kappa: f64) -> InteractionSpec {
    InteractionSpec::new(
        geometry,
        L,
        alpha_s,
        alpha_i,
        C64::new(kappa, 0.0),
        Arc::new(MaterialModel::default_linear()),
        pump(),
    )
    .unwrap()
}

fn small_grid(spec: &InteractionSpec, n: usize) -> Arc<FrequencyGrid> {
    let hw = 64.0 * feature_width(spec).unwrap();
    Arc::new(make_grid(spec.signal_center(), hw, n).unwrap())
}

use crate::types::FrequencyGrid;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn zero_coupling_is_dark() {
    let spec = setup(Geometry::Forward, 10.0, 50.0, 0.0);
    let eval = GridEvaluation::new(&spec, small_grid(&spec, 256), Execution::Sequential).unwrap();
    for p in &eval.points {
        assert_eq!(p.signal_density(), 0.0);
        assert_eq!(p.idler_density(), 0.0);
        assert_eq!(p.phi(), C64::new(0.0, 0.0));
    }
}

#[test]
fn lossless_spectrum_is_sinc_squared() {
    let spec = setup(Geometry::Forward, 0.0, 0.0, 0.01);
    let w0 = spec.signal_center();
    let peak = evaluate_point(&spec, w0).unwrap().signal_density();
    let hw = 8.0 * feature_width(&spec).unwrap();
    for k in -40..=40 {
        let w = w0 + hw * k as f64 / 40.0;
        let s = evaluate_point(&spec, w).unwrap().signal_density() / peak;
        let x = delta_k(&spec.dispersion, &spec, w).unwrap() * L / 2.0;
        let sinc2 = if x == 0.0 { 1.0 } else { (x.sin() / x).powi(2) };
        assert!((s - sinc2).abs() < 1e-6, "{k}: {s} {sinc2}");
    }
}

#[test]
fn lossless_rates_come_in_pairs() {
    let spec = setup(Geometry::Forward, 0.0, 0.0, 0.1);
    let rates = auto_grid(&spec, Execution::default()).unwrap().rates().unwrap();
    assert!(rel(rates.r_s, rates.r_i) < 1e-6, "{rates:?}");
    assert_eq!(rates.langevin_s, 0.0);
}

#[test]
fn lossless_wavefunction_has_sinc_magnitude() {
    let spec = setup(Geometry::Forward, 0.0, 0.0, 0.01);
    let w0 = spec.signal_center();
    let peak = evaluate_point(&spec, w0).unwrap().phi().norm();
    for k in 1..30 {
        let w = w0 + 1e10 * k as f64;
        let phi = evaluate_point(&spec, w).unwrap().phi().norm() / peak;
        let x = delta_k(&spec.dispersion, &spec, w).unwrap() * L / 2.0;
        assert!((phi - (x.sin() / x).abs()).abs() < 1e-6);
    }
}

#[test]
fn no_idler_loss_means_no_langevin_amplitude() {
    let spec = setup(Geometry::Forward, 30.0, 0.0, 0.1);
    let wf = GridEvaluation::new(&spec, small_grid(&spec, 128), Execution::Sequential)
        .unwrap()
        .wavefunction();
    assert!(wf.langevin_part.iter().all(|v| v.norm() == 0.0));
    for (v, p) in wf.values.iter().zip(&wf.parametric_part) {
        assert_eq!(v, p);
    }
}

#[test]
fn first_order_amplitude_matches_single_pass() {
    // one pair per pass: φ = −iκ(1 − e^{−s̄L})/s̄ with s = α_s + α_i + iΔk
    let kappa = 1e-3;
    for (a_s, a_i) in [(0.0, 50.0), (20.0, 300.0), (100.0, 0.0), (0.0, 0.0)] {
        let spec = setup(Geometry::Forward, a_s, a_i, kappa);
        for d in [0.0, 1e11, 3e11, 1e12, -2e12] {
            let w = spec.signal_center() + d;
            let phi = evaluate_point(&spec, w).unwrap().phi();
            let dk = delta_k(&spec.dispersion, &spec, w).unwrap();
            let s = C64::new(a_s + a_i, -dk);
            let want = if s.norm() == 0.0 {
                C64::new(0.0, -kappa * L)
            } else {
                C64::new(0.0, -kappa) * (1.0 - (-s * L).exp()) / s
            };
            assert!((phi - want).norm() < 1e-6 * want.norm(), "{a_s} {a_i} {d}: {phi} {want}");
        }
    }
}

#[test]
fn densities_and_parts_are_consistent() {
    let spec = setup(Geometry::Backward, 40.0, 200.0, 0.1);
    let eval = auto_grid(&spec, Execution::default()).unwrap();
    let r = eval.rates().unwrap();
    assert!(rel(r.r_s, r.parametric_s + r.langevin_s) < 1e-12);
    assert!(rel(r.r_i, r.parametric_i + r.langevin_i) < 1e-12);
    assert!([r.parametric_s, r.langevin_s, r.parametric_i, r.langevin_i].iter().all(|v| *v >= 0.0));
    let wf = eval.wavefunction();
    for k in 0..wf.values.len() {
        assert!((wf.values[k] - wf.parametric_part[k] - wf.langevin_part[k]).norm() <= 1e-15 * wf.values[k].norm());
    }
}

#[test]
fn narrow_grid_is_refused() {
    let spec = setup(Geometry::Forward, 0.0, 50.0, 0.1);
    let grid = Arc::new(make_grid(spec.signal_center(), feature_width(&spec).unwrap(), 64).unwrap());
    let err = count_rates(&spec, &grid).unwrap_err();
    assert!(matches!(err, crate::PdcError::GridTooNarrow { .. }), "{err:?}");
}

#[test]
fn bandwidth_grows_with_idler_loss() {
    let mut last = 0.0;
    for a_i in [0.0005, 5.0, 50.0, 500.0] {
        let spec = setup(Geometry::Forward, 0.0, a_i, 0.1);
        let bw = spectral_bandwidth(&auto_grid(&spec, Execution::default()).unwrap().spectrum(Label::Signal).unwrap()).unwrap();
        assert!(bw > last, "{a_i}: {bw} <= {last}");
        last = bw;
    }
}

#[test]
fn idler_rate_falls_faster() {
    let r0 = auto_grid(&setup(Geometry::Forward, 0.0, 0.0005, 0.1), Execution::default()).unwrap().rates().unwrap();
    let r1 = auto_grid(&setup(Geometry::Forward, 0.0, 500.0, 0.1), Execution::default()).unwrap().rates().unwrap();
    assert!(r1.r_s <= r0.r_s && r1.r_i <= r0.r_i);
    assert!(r0.r_i - r1.r_i > r0.r_s - r1.r_s);
}

#[test]
fn floor_is_the_product_of_rates() {
    let spec = setup(Geometry::Forward, 0.0, 100.0, 0.1);
    let eval = auto_grid(&spec, Execution::default()).unwrap();
    let r = eval.rates().unwrap();
    let curve = eval.correlation(&spec, &TauGrid::Conjugate, Execution::default()).unwrap();
    assert!(rel(curve.floor, r.r_s * r.r_i) < 1e-12);
    let support = L * crate::materials::delta_k_slope(&spec.dispersion, &spec).unwrap().abs();
    let far: Vec<f64> = curve
        .tau()
        .iter()
        .zip(curve.values())
        .filter(|(t, _)| **t < -0.5 * support || **t > 1.5 * support)
        .map(|(_, v)| *v)
        .collect();
    assert!(!far.is_empty());
    let mean = far.iter().sum::<f64>() / far.len() as f64;
    assert!(rel(mean, curve.floor) < 0.01);
}

#[test]
fn transform_conserves_norm() {
    for (g, a_i) in [(Geometry::Forward, 0.0), (Geometry::Forward, 300.0), (Geometry::Backward, 50.0)] {
        let spec = setup(g, 0.0, a_i, 0.1);
        let eval = auto_grid(&spec, Execution::default()).unwrap();
        let curve = eval.correlation(&spec, &TauGrid::Conjugate, Execution::default()).unwrap();
        assert!(parseval_residual(&spec, &eval, &curve).unwrap() < 1e-6);
    }
}

#[test]
fn explicit_tau_grid_matches_conjugate_grid() {
    let spec = setup(Geometry::Forward, 0.0, 200.0, 0.1);
    let eval = auto_grid(&spec, Execution::default()).unwrap();
    let conj = eval.correlation(&spec, &TauGrid::Conjugate, Execution::default()).unwrap();
    let picks: Vec<usize> = (0..conj.tau().len()).step_by(997).collect();
    let taus: Vec<f64> = picks.iter().map(|&k| conj.tau()[k]).collect();
    let direct = eval.correlation(&spec, &TauGrid::Explicit(taus), Execution::default()).unwrap();
    let peak = conj.correlated().iter().cloned().fold(0.0, f64::max);
    for (j, &k) in picks.iter().enumerate() {
        assert!((direct.values()[j] - conj.values()[k]).abs() < 1e-9 * peak);
    }
}

#[test]
fn aliasing_guard() {
    let spec = setup(Geometry::Forward, 0.0, 200.0, 0.1);
    let eval = auto_grid(&spec, Execution::default()).unwrap();
    let dw = eval.grid.spacing();
    let tau = vec![-4.0 * std::f64::consts::PI / dw, 0.0, 4.0 * std::f64::consts::PI / dw];
    let err = eval.correlation(&spec, &TauGrid::Explicit(tau), Execution::default()).unwrap_err();
    assert!(matches!(err, crate::PdcError::Resolution(_)), "{err:?}");
}

#[test]
fn lossless_forward_photon_length() {
    let spec = setup(Geometry::Forward, 0.0, 0.0, 0.1);
    let t = fwhm(&auto_grid(&spec, Execution::default()).unwrap().correlation(&spec, &TauGrid::Conjugate, Execution::default()).unwrap()).unwrap();
    let (rel_minus, _) = spec.dispersion.relative_velocities(spec.pump_omega).unwrap();
    // band-limited transform leaves a bias of order one coarse step
    assert!(rel(t, L / rel_minus) < 0.01, "{t}");
}

#[test]
fn lossy_photon_lengths() {
    let c = SPEED_OF_LIGHT;
    for (a_s, a_i, want) in [(0.0, 500.0, 1.0 / (c * 500.0)), (500.0, 500.0, 1.0 / (2.0 * c * 500.0))] {
        let spec = setup(Geometry::Forward, a_s, a_i, 0.1);
        let t = fwhm(&auto_grid(&spec, Execution::default()).unwrap().correlation(&spec, &TauGrid::Conjugate, Execution::default()).unwrap()).unwrap();
        assert!(rel(t, want) < 0.1, "{a_s} {a_i}: {t}");
    }
}

#[test]
fn flat_curve_has_no_width() {
    let curve = crate::types::CorrelationCurve::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0], 1.0).unwrap();
    assert!(matches!(fwhm(&curve), Err(crate::PdcError::DegenerateCurve(_))));
}

#[test]
fn coincidences_vanish_without_coupling() {
    let curve = crate::types::CorrelationCurve::new(vec![0.0, 1.0, 2.0], vec![0.0; 3], 0.0).unwrap();
    assert_eq!(coincidence_rate(&curve), 0.0);
}

#[test]
fn taper_is_symmetric_and_bounded() {
    let w = taper_weights(64);
    for k in 0..64 {
        assert!((0.0..=1.0).contains(&w[k]));
        assert!((w[k] - w[63 - k]).abs() < 1e-15);
    }
}

/// 2π·S_i/|κ|² at first order: ∫∫ e^{−α_i(2L−z−z′)} e^{iΔk(z−z′)} e^{−α_s|z−z′|} dz dz′,
/// reduced to one integral over u = z − z′.
fn first_order_idler(a_s: f64, a_i: f64, dk: f64) -> f64 {
    let f = |u: f64| {
        let w = if a_i == 0.0 { L - u } else { ((-a_i * u).exp() - (-a_i * (2.0 * L - u)).exp()) / (2.0 * a_i) };
        2.0 * (-a_s * u).exp() * (dk * u).cos() * w
    };
    let n = 20000;
    let h = L / n as f64;
    let mut acc = f(0.0) + f(L);
    for k in 1..n {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn signal_loss_reshapes_idler_spectrum_at_first_order() {
    let kappa = 1e-3;
    for a_s in [0.0, 50.0, 200.0] {
        let spec = setup(Geometry::Forward, a_s, 200.0, kappa);
        for d in [0.0, 1e11, 3e11, 1e12] {
            let w = spec.signal_center() + d;
            let got = evaluate_point(&spec, w).unwrap().idler_density() * 2.0 * std::f64::consts::PI / (kappa * kappa);
            let dk = delta_k(&spec.dispersion, &spec, w).unwrap();
            let want = first_order_idler(a_s, 200.0, dk);
            assert!(rel(got, want) < 1e-6, "{a_s} {d}: {got} {want}");
        }
    }
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let peak = v.iter().cloned().fold(0.0, f64::max);
    v.iter().map(|x| x / peak).collect()
}

#[test]
fn low_gain_shapes_scale_out() {
    let strong = setup(Geometry::Forward, 20.0, 150.0, 0.1);
    let weak = strong.with_kappa(C64::new(0.01, 0.0)).unwrap();
    let grid = auto_grid(&strong, Execution::default()).unwrap().grid;
    let a = GridEvaluation::new(&strong, grid.clone(), Execution::default()).unwrap();
    let b = GridEvaluation::new(&weak, grid, Execution::default()).unwrap();
    for label in [Label::Signal, Label::Idler] {
        let sa = normalized(a.spectrum(label).unwrap().values());
        let sb = normalized(b.spectrum(label).unwrap().values());
        let worst = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-4, "{label:?}: {worst}");
    }
    let ga = normalized(&a.correlation(&strong, &TauGrid::Conjugate, Execution::default()).unwrap().correlated());
    let gb = normalized(&b.correlation(&weak, &TauGrid::Conjugate, Execution::default()).unwrap().correlated());
    let worst = ga.iter().zip(&gb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn densities_are_non_negative(
        a_s in 0.0f64..500.0,
        a_i in 0.0f64..500.0,
        kappa in 0.0f64..0.5,
        backward in any::<bool>(),
        d in -3e12f64..3e12,
    ) {
        let g = if backward { Geometry::Backward } else { Geometry::Forward };
        let spec = setup(g, a_s, a_i, kappa);
        let p = evaluate_point(&spec, spec.signal_center() + d).unwrap();
        prop_assert!(p.signal_density() >= 0.0);
        prop_assert!(p.idler_density() >= 0.0);
        prop_assert!(p.ff >= 0.0 && p.gg >= 0.0);
    }

    #[test]
    fn rates_never_exceed_lossless(a_i in 0.0f64..500.0) {
        let lossless = auto_grid(&setup(Geometry::Forward, 0.0, 0.0, 0.1), Execution::default()).unwrap().rates().unwrap();
        let lossy = auto_grid(&setup(Geometry::Forward, 0.0, a_i, 0.1), Execution::default()).unwrap().rates().unwrap();
        prop_assert!(lossy.r_i <= lossless.r_i * (1.0 + 1e-9));
    }
}
