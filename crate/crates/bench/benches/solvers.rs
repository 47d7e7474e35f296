use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use madde_bench::{competition, HUTCHINSON, SINGLE, TRADEOFF};
use madde_core::stability::{char_hutchinson, DEFAULT_PANELS};
use madde_core::{
    count_unstable_roots, ess_tau, integrate, scan_grid, InitialHistory, IntegratorConfig, Model, SearchRect,
};

fn bench_integrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate");
    let cases = [
        ("madde", Model::Madde(SINGLE), vec![0.1]),
        ("adde", Model::Adde(SINGLE), vec![0.1]),
        ("hutchinson", Model::Hutchinson(HUTCHINSON), vec![0.5]),
        ("competition", Model::Competition(competition(1.0, 1.5)), vec![0.8, 0.1]),
    ];
    for (name, model, x0) in cases {
        let hist = InitialHistory::constant(&x0).unwrap();
        let cfg = IntegratorConfig::with_default_step(&model.delays(), 100.0);
        group.bench_function(BenchmarkId::new(name, "t_end=100"), |b| {
            b.iter(|| integrate(black_box(&model), &hist, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_root_count(c: &mut Criterion) {
    let x_bar = HUTCHINSON.k_cap;
    let rect = SearchRect::for_model(&Model::Hutchinson(HUTCHINSON));
    c.bench_function("count_unstable_roots/hutchinson", |b| {
        b.iter(|| {
            count_unstable_roots(|l| char_hutchinson(&HUTCHINSON, x_bar, l), black_box(rect), DEFAULT_PANELS).unwrap()
        })
    });
}

fn bench_scan_grid(c: &mut Criterion) {
    let base = competition(1.0, 1.0);
    let mut group = c.benchmark_group("scan_grid");
    for n in [50, 200] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| scan_grid(black_box(&base), (0.0, 3.0), (0.0, 3.0), n).unwrap())
        });
    }
    group.finish();
}

fn bench_ess(c: &mut Criterion) {
    c.bench_function("ess_tau", |b| b.iter(|| ess_tau(black_box(&TRADEOFF)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_integrate, bench_root_count, bench_scan_grid, bench_ess
}
criterion_main!(benches);
