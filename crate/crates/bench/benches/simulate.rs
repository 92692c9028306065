use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dvsound::simulate::{run_forced, Boundary, ForcingOptions, Mode, Scheme, Stepper, WaveField};
use dvsound::ModelConfig;

fn stepping(c: &mut Criterion) {
    let cfg = ModelConfig::physical(4, 0.3, 1.0, 0.4, 1.0, 1.0, 0.5).unwrap();
    let cells = 512;
    let dx = 1.0 / cells as f64;
    let p = (0..8)
        .map(|i| (0..cells).map(|j| 0.01 * ((i * j) as f64 * 0.01).sin()).collect())
        .collect();
    let field = WaveField::from_components(&cfg, p, dx, Boundary::Periodic).unwrap();
    for mode in [Mode::Linear, Mode::Nonlinear] {
        let stepper = Stepper::new(&cfg, mode, Scheme::LaxWendroff, dx, 0.4 * dx).unwrap();
        c.bench_function(&format!("step {mode:?} n=4, 512 cells"), |b| {
            let mut f = field.clone();
            b.iter(|| stepper.step(black_box(&mut f)).unwrap())
        });
    }
}

fn forced(c: &mut Criterion) {
    let cfg = ModelConfig::reduced(2, 0.2, 1.0, 0.0).unwrap();
    let options = ForcingOptions {
        points_per_wavelength: 20,
        ..ForcingOptions::default()
    };
    let mut group = c.benchmark_group("forced");
    group.sample_size(10);
    group.bench_function("run_forced + fit, 20 ppw", |b| {
        b.iter(|| run_forced(black_box(&cfg), &options).unwrap().fit().unwrap())
    });
    group.finish();
}

criterion_group!(benches, stepping, forced);
criterion_main!(benches);
