use criterion::{criterion_group, criterion_main, Criterion};
use onskit_core::constructions::extremal_function;
use onskit_core::functionals::{abel_decomposition, mn_functional};
use onskit_core::systems::{Haar, Trig, Walsh};
use onskit_core::{banach_seed_function, CoefficientSeq, EpsilonParams, QuadratureConfig};

fn mn(c: &mut Criterion) {
    let eps = EpsilonParams::new(0.5).unwrap();
    let a = CoefficientSeq::power(0.75, 2048);
    let mut group = c.benchmark_group("mn_2048");
    group.sample_size(10);
    group.bench_function("trig", |b| {
        b.iter(|| mn_functional(&a, &Trig, 2048, &eps).unwrap())
    });
    group.bench_function("walsh", |b| {
        b.iter(|| mn_functional(&a, &Walsh, 2048, &eps).unwrap())
    });
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let f = banach_seed_function();
    let a = CoefficientSeq::power(0.75, 64);
    let quad = QuadratureConfig::default();
    let mut group = c.benchmark_group("abel_64");
    group.sample_size(10);
    group.bench_function("haar", |b| {
        b.iter(|| abel_decomposition(&f, &a, &Haar, 64, &quad).unwrap())
    });
    group.finish();
}

fn extremal(c: &mut Criterion) {
    let eps = EpsilonParams::new(0.5).unwrap();
    let b = CoefficientSeq::power(0.5, 64);
    let mut group = c.benchmark_group("extremal_64");
    group.sample_size(10);
    group.bench_function("trig", |bch| {
        bch.iter(|| extremal_function(&b, &Trig, 64, &eps).unwrap())
    });
    group.finish();
}

criterion_group!(benches, mn, decomposition, extremal);
criterion_main!(benches);
