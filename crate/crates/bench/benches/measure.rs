use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spincorr::state::random_pure_state;
use spincorr::*;

fn measure_routes(c: &mut Criterion) {
    let state = random_pure_state(&mut spincorr::rng::seeded(1));
    let rho = state.density_matrix();
    let mut g = c.benchmark_group("entanglement_measure");
    g.bench_function("closed_form", |b| b.iter(|| entanglement_measure(black_box(&state)).unwrap()));
    g.bench_function("trace_form", |b| b.iter(|| entanglement_measure(black_box(&rho)).unwrap()));
    g.finish();
}

fn scattering_sweep(c: &mut Criterion) {
    let grid = SweepGrid::linspace(0.01, PI - 0.01, 181, vec![PI / 4.0, 3.0 * PI / 4.0], vec![0.0], 1.5).unwrap();
    c.bench_function("sweep_181x2", |b| b.iter(|| sweep(black_box(&grid)).unwrap()));
}

fn experiment(c: &mut Criterion) {
    let rho = bell_state(BellKind::Singlet).density_matrix();
    let mut g = c.benchmark_group("run_experiment");
    g.sample_size(20);
    for m in [1_000usize, 100_000] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| run_experiment(&rho, m, 42, &Bootstrap::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, measure_routes, scattering_sweep, experiment);
criterion_main!(benches);
