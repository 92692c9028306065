use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dvsound::analysis::{find_hmax, log_grid};
use dvsound::dispersion::{assemble_polynomial, continuation_track, solve_roots, Branch};

fn roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_roots");
    for n in [2usize, 3, 4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve_roots(&assemble_polynomial(black_box(1.3), black_box(0.2), n)).unwrap())
        });
    }
    group.finish();
}

fn continuation(c: &mut Criterion) {
    let grid = log_grid(1e-2, 1e4, 601).unwrap();
    c.bench_function("continuation_track n=3, 601 points", |b| {
        b.iter(|| continuation_track(black_box(0.3), 3, 0.0, &grid).unwrap())
    });
}

fn peak(c: &mut Criterion) {
    c.bench_function("find_hmax n=2", |b| {
        b.iter(|| find_hmax(black_box(0.1), 0.0, 2, Branch::Acoustic, (1e-2, 1e2)).unwrap())
    });
}

criterion_group!(benches, roots, continuation, peak);
criterion_main!(benches);
