use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mclm_core::flows::{eulerian_rhs, spray, FlowState, Formulation, Inertia, ModelParams, Solver, SolverConfig};
use mclm_core::spectral::TWO_PI;
use mclm_core::{compose, invert, make_diffeo, SpectralFunction, TangentVector};

fn velocity(n: usize) -> SpectralFunction {
    SpectralFunction::from_fn(n, |x| 0.05 * (TWO_PI * x).sin() + 0.02 * (2.0 * TWO_PI * x).sin()).unwrap()
}

fn displacement(n: usize) -> SpectralFunction {
    SpectralFunction::from_fn(n, |x| 0.02 * (TWO_PI * x).sin() + 0.01 * (3.0 * TWO_PI * x).cos())
        .unwrap()
        .to_chart()
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral");
    for n in [128, 512] {
        let u = velocity(n);
        let samples = u.samples().to_vec();
        g.bench_with_input(BenchmarkId::new("analyze", n), &samples, |b, s| {
            b.iter(|| SpectralFunction::analyze(s).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("dealiased_product", n), &u, |b, u| {
            b.iter(|| u.product(&u.derivative(), true).unwrap())
        });
    }
    g.finish();
}

fn diffeo(c: &mut Criterion) {
    let mut g = c.benchmark_group("diffeo");
    for n in [128, 256] {
        let phi = make_diffeo(displacement(n)).unwrap();
        let u = velocity(n);
        g.bench_with_input(BenchmarkId::new("compose", n), &n, |b, _| b.iter(|| compose(&u, &phi).unwrap()));
        g.bench_with_input(BenchmarkId::new("invert", n), &n, |b, _| b.iter(|| invert(&phi).unwrap()));
    }
    g.finish();
}

fn flows(c: &mut Criterion) {
    let n = 128;
    let p = ModelParams::new(2.0, Inertia::Hd).unwrap();
    let u = velocity(n);
    let phi = make_diffeo(displacement(n)).unwrap();
    let v = TangentVector::new(u.clone()).unwrap();
    let mut g = c.benchmark_group("flows");
    g.bench_function("eulerian_rhs", |b| b.iter(|| eulerian_rhs(&u, &p, true).unwrap()));
    g.bench_function("spray", |b| b.iter(|| spray(&phi, &v, &p, true).unwrap()));
    for f in [Formulation::EulerianU, Formulation::Lagrangian] {
        let solver = Solver::new(f, p, SolverConfig::new(n, 1e-3, 1.0)).unwrap();
        let state: FlowState = solver.initial_state(&u).unwrap();
        g.bench_function(format!("rk4_step/{f:?}"), |b| b.iter(|| solver.step(&state, 1e-3).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, spectral, diffeo, flows);
criterion_main!(benches);
