//! Compares the parallel replication study against the sequential baseline,
//! plus a single path fit on the full second-order design.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hlars_core::{
    expand_second_order, gen_model1, lars_fit, replicate_study, replicate_study_serial,
    AlgorithmKind, DesignKind, LarsOptions, SimConfig,
};

fn study_config(reps: usize) -> SimConfig {
    SimConfig {
        n: 200,
        reps,
        noise_sd: 0.05,
        master_seed: 2024,
        design: DesignKind::MainOnly,
        algorithm: AlgorithmKind::Lars,
    }
}

fn bench_replicate(c: &mut Criterion) {
    let cfg = study_config(64);
    let mut group = c.benchmark_group("replicate_study");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| replicate_study(black_box(&cfg)).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| replicate_study_serial(black_box(&cfg)).unwrap())
    });
    group.finish();
}

fn bench_full_design_fit(c: &mut Criterion) {
    let (raw, y) = gen_model1(500, 0.05, 7);
    let dm = expand_second_order(&raw, true, true).unwrap();
    let opts = LarsOptions::default();
    c.bench_function("lars_fit/full_design_n500", |b| {
        b.iter(|| lars_fit(black_box(&dm), black_box(&y), &opts).unwrap())
    });
}

criterion_group!(benches, bench_replicate, bench_full_design_fit);
criterion_main!(benches);
