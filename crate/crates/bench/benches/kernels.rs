use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use arcdet_bench::{coefficients, odd_r1, one_cut_half, BITS};
use arcdet_core::gas_mc::{run_chain, McSettings, DEFAULT_SEED};
use arcdet_core::numerics::RealContext;
use arcdet_core::toeplitz::{log_det_dense, log_det_levinson, log_det_prefix_config};
use arcdet_core::toprec::{FreeEnergyTable, SymbolicField, TopRec};

fn levinson(c: &mut Criterion) {
    let mut group = c.benchmark_group("levinson");
    for n in [20usize, 35, 70] {
        let (coeffs, ctx) = coefficients(&one_cut_half(), n);
        group.bench_with_input(BenchmarkId::new("one_cut", n), &n, |b, &n| {
            b.iter(|| log_det_levinson(black_box(&coeffs), n, &ctx).unwrap())
        });
    }
    let (coeffs, ctx) = coefficients(&odd_r1((1, 2)), 70);
    group.bench_function("odd_r1_70", |b| {
        b.iter(|| log_det_levinson(black_box(&coeffs), 70, &ctx).unwrap())
    });
    group.bench_function("prefix_config_odd_r1_70", |b| {
        b.iter(|| log_det_prefix_config(black_box(&odd_r1((3, 10))), 70, BITS).unwrap())
    });
    group.finish();
}

fn dense(c: &mut Criterion) {
    let (coeffs, ctx) = coefficients(&one_cut_half(), 35);
    c.bench_function("cholesky_one_cut_35", |b| {
        b.iter(|| log_det_dense(black_box(&coeffs), 35, &ctx).unwrap())
    });
}

fn topological_recursion(c: &mut Criterion) {
    let mut group = c.benchmark_group("toprec");
    group.sample_size(10);
    for g_max in [2u32, 3, 4] {
        group.bench_with_input(BenchmarkId::new("free_energies", g_max), &g_max, |b, &g| {
            b.iter(|| FreeEnergyTable::compute(g).unwrap())
        });
    }
    group.bench_function("omega_1_2", |b| {
        b.iter(|| {
            let mut rec = TopRec::new(SymbolicField);
            rec.omega(1, 2).unwrap().terms.len()
        })
    });
    group.finish();
}

fn fourier(c: &mut Criterion) {
    let ctx = RealContext::new(BITS).unwrap();
    let cfg = odd_r1((1, 10));
    c.bench_function("fourier_odd_r1_200", |b| {
        b.iter(|| arcdet_core::symbol::fourier_coefficients(black_box(&cfg), 200, &ctx))
    });
}

fn metropolis(c: &mut Criterion) {
    let mut group = c.benchmark_group("gas");
    group.sample_size(10);
    let settings = McSettings { sweeps: 500, thin: 5 };
    group.bench_function("one_cut_n20_500_sweeps", |b| {
        b.iter(|| run_chain(&one_cut_half(), 20, &settings, DEFAULT_SEED, 0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, levinson, dense, topological_recursion, fourier, metropolis);
criterion_main!(benches);
