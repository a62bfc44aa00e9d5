use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gfix_core::contractions::{check_condition_vetro, CoefficientSchedule, MappingFamily, Mode, PhiFunction, SelfMap};
use gfix_core::gmetric::{check_axioms, Carrier, GSpace, Metric, Point};
use gfix_core::oracle::{theorem_sweep, EnumerationConfig, SweepOptions};
use gfix_core::solver::picard_orbit;

fn halving() -> MappingFamily {
    MappingFamily::repeated(SelfMap::Affine { scale: 0.5, shift: 0.0 }, 64).unwrap()
}

fn g_evaluation(c: &mut Criterion) {
    let s = GSpace::sum_abs(-1.0, 1.0).unwrap();
    let (x, y, z) = (Point::Real(0.1), Point::Real(-0.4), Point::Real(0.7));
    c.bench_function("evaluate_g/sum_abs", |b| {
        b.iter(|| s.evaluate_g(black_box(&x), black_box(&y), black_box(&z)).unwrap())
    });
    let d = GSpace::discrete_g((0..5).map(|i| i.to_string()).collect()).unwrap();
    let (i, j, k) = (Point::Index(0), Point::Index(3), Point::Index(4));
    c.bench_function("evaluate_g/table", |b| {
        b.iter(|| d.evaluate_g(black_box(&i), black_box(&j), black_box(&k)).unwrap())
    });
}

fn axioms(c: &mut Criterion) {
    let n = 5;
    let d: Vec<f64> = (0..n * n)
        .map(|e| {
            if e / n == e % n {
                0.0
            } else {
                1.0 + ((e / n + e % n) % 2) as f64
            }
        })
        .collect();
    let s = GSpace::from_metric_sum(Carrier::finite(n), Metric::table(n, d).unwrap()).unwrap();
    c.bench_function("check_axioms/exhaustive_5", |b| {
        b.iter(|| check_axioms(&s, 625, 0).unwrap())
    });
    let r = GSpace::max_abs(-1.0, 1.0).unwrap();
    c.bench_function("check_axioms/sampled_10k", |b| {
        b.iter(|| check_axioms(&r, 10_000, 0).unwrap())
    });
}

fn orbits(c: &mut Criterion) {
    let s = GSpace::sum_abs(-1.0, 1.0).unwrap();
    let fam = halving();
    c.bench_function("picard_orbit/halving", |b| {
        b.iter(|| picard_orbit(&s, &fam, black_box(&Point::Real(1.0)), 200, 1e-12).unwrap())
    });
    let sched = CoefficientSchedule::vetro_constant(0.0, 0.6);
    let id = PhiFunction::identity();
    c.bench_function("check_condition_vetro/20k", |b| {
        b.iter(|| check_condition_vetro(&s, &fam, &sched, &id, 1, 20_000, 0).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let opts = SweepOptions {
        config: EnumerationConfig {
            carrier_size: 2,
            mode: Mode::Abbas,
            ..EnumerationConfig::default()
        },
        ..SweepOptions::default()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("abbas_carrier_2", |b| b.iter(|| theorem_sweep(&opts).unwrap()));
    group.finish();
}

criterion_group!(benches, g_evaluation, axioms, orbits, sweep);
criterion_main!(benches);
