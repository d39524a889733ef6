//! Chunked-parallel versus sequential evaluation of the smoothed
//! objective kernel, over generated box instances of increasing size.
//!
//! Both paths use the same fixed chunking and combine partial results in
//! index order, so their outputs are bitwise identical; the only
//! difference measured here is scheduling overhead versus speedup.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sylvester::generator::{generate_boxes, BoxConfig, SeedConvention};
use sylvester::smoothing::{smooth_value_gradient, smooth_value_gradient_seq, MajorizationAnchor};

fn bench_smooth_kernel(c: &mut Criterion) {
    let sizes = [(3usize, 100usize), (3, 500), (100, 1000)];
    let p = 1e-3;

    let mut group = c.benchmark_group("smooth_value_gradient");
    for (dim, count) in sizes {
        let config = BoxConfig { dim, count, seed: 7, convention: SeedConvention::SkipSeed };
        let inst = generate_boxes(&config).expect("generated instance is valid");
        let x = vec![50.0; dim];
        let label = format!("n{dim}_m{count}");

        group.bench_with_input(BenchmarkId::new("parallel", &label), &inst, |b, inst| {
            b.iter(|| smooth_value_gradient(inst, &x, p).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", &label), &inst, |b, inst| {
            b.iter(|| smooth_value_gradient_seq(inst, &x, p).unwrap())
        });
    }
    group.finish();
}

fn bench_anchored_eval(c: &mut Criterion) {
    let (dim, count) = (100usize, 1000usize);
    let config = BoxConfig { dim, count, seed: 7, convention: SeedConvention::SkipSeed };
    let inst = generate_boxes(&config).expect("generated instance is valid");
    let x = vec![50.0; dim];
    let anchor = MajorizationAnchor::freeze(&inst, &x).expect("instance is smoothable");
    let p = 1e-3;

    let mut group = c.benchmark_group("anchored_value_gradient");
    group.bench_function("parallel", |b| b.iter(|| anchor.value_gradient(&x, p)));
    group.bench_function("sequential", |b| b.iter(|| anchor.value_gradient_seq(&x, p)));
    group.finish();
}

criterion_group!(benches, bench_smooth_kernel, bench_anchored_eval);
criterion_main!(benches);
