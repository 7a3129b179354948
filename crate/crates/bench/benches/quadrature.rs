use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use toa_core::presets::{cesium_kx0, cesium_packet, CESIUM_WIDE_DY};
use toa_core::toa::uniform_times;
use toa_core::{pi_1d, pi_2d, solve_1d, solve_2d, PhysParams, QuadratureSpec};

fn eigen(c: &mut Criterion) {
    let p = PhysParams::cesium();
    let kx = cesium_kx0(&p);
    let ky = p.wavenumber_of(10.0);
    c.bench_function("solve_1d", |b| {
        b.iter(|| solve_1d(&p, black_box(kx)).unwrap())
    });
    c.bench_function("solve_2d", |b| {
        b.iter(|| solve_2d(&p, black_box(kx), black_box(ky)).unwrap())
    });
}

fn series(c: &mut Criterion) {
    let p = PhysParams::cesium();
    let g = cesium_packet(&p, CESIUM_WIDE_DY);
    let q = QuadratureSpec::with_default_nodes(uniform_times(0.0, 60e-6, 201));
    let mut group = c.benchmark_group("toa");
    group.sample_size(10);
    group.bench_function("pi_1d_96_nodes_201_times", |b| {
        b.iter(|| pi_1d(&p, &g.x_marginal(), black_box(&q)).unwrap())
    });
    group.bench_function("pi_2d_96x48_nodes_201_times", |b| {
        b.iter(|| pi_2d(&p, &g, black_box(&q)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigen, series);
criterion_main!(benches);
