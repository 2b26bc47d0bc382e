use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pdc_core::linalg::C64;
use pdc_core::materials::MaterialModel;
use pdc_core::observables::{feature_width, GridEvaluation, TauGrid};
use pdc_core::parallel::Execution;
use pdc_core::types::{make_grid, Geometry, InteractionSpec, SPEED_OF_LIGHT};

fn spec(geometry: Geometry) -> InteractionSpec {
    InteractionSpec::new(
        geometry,
        0.01,
        20.0,
        300.0,
        C64::new(0.1, 0.0),
        Arc::new(MaterialModel::default_linear()),
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 1.064e-6,
    )
    .unwrap()
}

fn grid_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_eval");
    group.sample_size(20);
    for geometry in [Geometry::Forward, Geometry::Backward] {
        let s = spec(geometry);
        let grid = Arc::new(make_grid(s.signal_center(), 512.0 * feature_width(&s).unwrap(), 1 << 14).unwrap());
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, geometry), &exec, |b, &exec| {
                b.iter(|| GridEvaluation::new(&s, grid.clone(), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn correlation(c: &mut Criterion) {
    let mut group = c.benchmark_group("correlation");
    group.sample_size(20);
    let s = spec(Geometry::Forward);
    let grid = Arc::new(make_grid(s.signal_center(), 512.0 * feature_width(&s).unwrap(), 1 << 14).unwrap());
    let eval = GridEvaluation::new(&s, grid, Execution::Parallel).unwrap();
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| eval.correlation(&s, &TauGrid::Conjugate, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, grid_eval, correlation);
criterion_main!(benches);
