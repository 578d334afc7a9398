use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nekrasov_bench::{blowup_check, plane_series, plane_series_with_tau, wallcross_sweep};

fn partition_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("z_inst");
    g.sample_size(10);
    g.bench_function("r1_l0_order6", |b| b.iter(|| plane_series(black_box(1), 0, 6).unwrap()));
    g.bench_function("r2_l0_order4", |b| b.iter(|| plane_series(black_box(2), 0, 4).unwrap()));
    g.bench_function("r2_tau1_order4", |b| b.iter(|| plane_series_with_tau(black_box(2), 1, 4).unwrap()));
    g.finish();
}

fn identities(c: &mut Criterion) {
    let mut g = c.benchmark_group("blowup_eq");
    g.sample_size(10);
    g.bench_function("r2_l0_d1_order4", |b| b.iter(|| assert!(blowup_check(black_box(2), 0, 1, 4).unwrap().holds())));
    g.finish();
}

fn wallcross(c: &mut Criterion) {
    c.bench_function("wallcross_sweep_r4", |b| b.iter(|| wallcross_sweep(black_box(4)).unwrap()));
}

criterion_group!(benches, partition_functions, identities, wallcross);
criterion_main!(benches);
