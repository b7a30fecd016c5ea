use criterion::{black_box, criterion_group, criterion_main, Criterion};
use shadowtrace::dynamics::{integrate_ese, integrate_rse};
use shadowtrace::rotation::{critical_distance, rotation_number};
use shadowtrace::{IntegrationConfig, PoincareMap};
use shadowtrace_bench::{circle, ellipse, fourier8};
use std::f64::consts::TAU;

fn period_map(c: &mut Criterion) {
    let cfg = IntegrationConfig::default();
    let mut g = c.benchmark_group("period_map");
    for (name, curve) in [("circle", circle()), ("ellipse", ellipse()), ("fourier8", fourier8())] {
        let map = PoincareMap::new(&curve, 1.3, &cfg).unwrap();
        g.bench_function(name, |b| b.iter(|| map.apply(black_box(0.4)).unwrap()));
    }
    g.finish();
}

fn trajectories(c: &mut Criterion) {
    let cfg = IntegrationConfig::default();
    let e = ellipse();
    c.bench_function("rse_one_period", |b| b.iter(|| integrate_rse(&e, black_box(1.3), 0.4, (0.0, TAU), &cfg).unwrap()));
    c.bench_function("ese_one_period", |b| b.iter(|| integrate_ese(&e, black_box(1.3), 0.4, (0.0, TAU), &cfg).unwrap()));
}

fn rotation(c: &mut Criterion) {
    let cfg = IntegrationConfig::default();
    let e = ellipse();
    let mut g = c.benchmark_group("rotation");
    g.sample_size(10);
    g.bench_function("rotation_number_64", |b| b.iter(|| rotation_number(&e, black_box(2.0), 64, &cfg).unwrap()));
    g.bench_function("critical_distance_ellipse", |b| {
        b.iter(|| critical_distance(&e, black_box(1e-2), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, period_map, trajectories, rotation);
criterion_main!(benches);
