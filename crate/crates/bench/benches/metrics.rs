use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hypermetric::{
    caratheodory_distance, integrated_distance, poincare_distance, Caratheodory, Complex64, Kobayashi, Metric,
    PathOptions,
};
use hypermetric_bench::{bidisc, scalar, semianalytic_disk, unit_disk};
use std::hint::black_box;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn infinitesimal(cr: &mut Criterion) {
    let disk = unit_disk();
    let semi = semianalytic_disk();
    let x = [c(0.3, -0.2)];
    let v = [c(0.6, 0.8)];
    let mut g = cr.benchmark_group("infinitesimal");
    for (name, d) in [("disk", &disk), ("semianalytic", &semi)] {
        let car = Caratheodory::new(d);
        let kob = Kobayashi::new(d);
        g.bench_with_input(BenchmarkId::new("caratheodory", name), &(), |b, _| {
            b.iter(|| car.eval(black_box(&x), black_box(&v)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("kobayashi", name), &(), |b, _| {
            b.iter(|| kob.eval(black_box(&x), black_box(&v)).unwrap())
        });
    }
    g.finish();
}

fn distances(cr: &mut Criterion) {
    cr.bench_function("poincare_distance", |b| {
        b.iter(|| poincare_distance(black_box(c(0.5, 0.1)), black_box(c(-0.3, 0.4))).unwrap())
    });
    let bi = bidisc(1.0);
    cr.bench_function("bidisc_closed_form", |b| {
        b.iter(|| {
            caratheodory_distance(
                &bi,
                black_box(&[c(0.5, 0.0), c(0.0, 0.2)]),
                black_box(&[c(-0.1, 0.3), c(0.4, 0.0)]),
            )
            .unwrap()
        })
    });

    let disk = unit_disk();
    let metric = Caratheodory::new(&disk);
    let opts = PathOptions {
        segments: 4,
        refinements: 2,
        ..PathOptions::default()
    };
    let (a, z) = (scalar(0.0, 0.0), scalar(0.5, 0.3));
    let mut g = cr.benchmark_group("integrated");
    g.sample_size(10);
    g.bench_function("disk_caratheodory", |b| {
        b.iter(|| integrated_distance(&metric, &a, &z, &opts).unwrap())
    });
    g.finish();
}

criterion_group!(benches, infinitesimal, distances);
criterion_main!(benches);
