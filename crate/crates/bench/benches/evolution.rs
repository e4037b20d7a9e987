use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use weakpdc::fock::{gaussian_meter_state, FockSpace, GaussianMeterSpec};
use weakpdc::setup::{meter_state, preselected_state, SetupConfig};
use weakpdc::weak::{coupling_unitary, CouplingConfig, Propagate};
use weakpdc::run_experiment;

fn dense_unitary(c: &mut Criterion) {
    let mut group = c.benchmark_group("coupling_unitary_dense");
    for n in [4usize, 8, 12] {
        let s = FockSpace::new(n).unwrap();
        let cfg = CouplingConfig { g: 0.05, phi: 0.3 };
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &n, |b, _| {
            b.iter(|| coupling_unitary(black_box(&cfg), s, s).unwrap())
        });
    }
    group.finish();
}

fn sparse_propagation(c: &mut Criterion) {
    let mut group = c.benchmark_group("sparse_propagation");
    for dq in [std::f64::consts::FRAC_1_SQRT_2, 0.3, 2.0] {
        let cfg = SetupConfig { meter_dq: dq, g: 1e-3, epsilon: 0.1, alpha_re: 0.5, ..SetupConfig::default() };
        let model = weakpdc::setup::measurement_model(&cfg).unwrap();
        let sys = preselected_state(&cfg).unwrap();
        let meter = meter_state(&cfg).unwrap();
        let joint = sys.amplitudes() * meter.amplitudes().transpose();
        group.bench_with_input(BenchmarkId::new("meter_dq", dq), &dq, |b, _| {
            b.iter(|| model.propagate(black_box(&joint)).unwrap())
        });
    }
    group.finish();
}

fn meter_preparation(c: &mut Criterion) {
    let spec = GaussianMeterSpec::new(1.0, 0.0, 0.25).unwrap();
    let space = FockSpace::new(200).unwrap();
    c.bench_function("gaussian_meter_state_dq0.25", |b| {
        b.iter(|| gaussian_meter_state(space, black_box(&spec)).unwrap())
    });
}

fn full_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    let cases = [
        ("default", SetupConfig::default()),
        ("coherent_meter", SetupConfig { meter_q0: 1.0, epsilon: 0.1, alpha_re: 0.5, g: 1e-3, ..SetupConfig::default() }),
    ];
    for (name, cfg) in cases {
        group.bench_function(name, |b| b.iter(|| run_experiment(black_box(&cfg)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, dense_unitary, sparse_propagation, meter_preparation, full_run);
criterion_main!(benches);
