//! Criterion benchmarks for the heavy pipeline stages: multiplier transforms,
//! the fixed-point iteration, and the dense eigensolver oracle.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use simop_bench::{integer_frame, random_perturbation};
use simop_core::kernels::KernelKind;
use simop_core::{
    apply_toeplitz_multiplier, dense_spectrum, iterate_fixed_point, IterationConfig,
    MultiplierPair, MultiplierRole, Variant,
};

fn bench_multiplier(c: &mut Criterion) {
    let mut group = c.benchmark_group("toeplitz_multiplier");
    for &n in &[16usize, 64, 128] {
        let frame = integer_frame(n);
        let b = random_perturbation(&frame, 1.0, 7);
        let pair = MultiplierPair::new(KernelKind::Trapezoid, n as f64 / 4.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| {
                apply_toeplitz_multiplier(&frame, &pair, MultiplierRole::Gamma, &b).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_fixed_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixed_point_phi1");
    for &n in &[16usize, 64] {
        let frame = integer_frame(n);
        // keep 10.8 * sqrt(3) * gamma * ||B|| well under 1 at a = n/8
        let a = n as f64 / 8.0;
        let norm = 0.5 * a / (10.8 * 3f64.sqrt() * 1.35);
        let b = random_perturbation(&frame, norm, 11);
        let config = IterationConfig::new(Variant::Phi1, a);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| iterate_fixed_point(&frame, &b, &config).unwrap())
        });
    }
    group.finish();
}

fn bench_eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_spectrum");
    group.sample_size(20);
    for &n in &[16usize, 64] {
        let frame = integer_frame(n);
        let b = random_perturbation(&frame, 1.0, 13);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| dense_spectrum(&b).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_multiplier, bench_fixed_point, bench_eigensolver);
criterion_main!(benches);
