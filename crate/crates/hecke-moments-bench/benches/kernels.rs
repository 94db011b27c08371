use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hecke_moments::oscillatory::gaussian_moment;
use hecke_moments::rmt_coefficients::arithmetic_ak;
use hecke_moments::special_functions::{kloosterman_batch, lerch_e, riemann_zeta};
use hecke_moments::transforms::h_star;
use hecke_moments_bench::{bench_ctx, point, small_weight};

fn special(c: &mut Criterion) {
    let cx = bench_ctx();
    let s = point(&cx, 0.5, 100.0);
    c.bench_function("zeta critical line t=100", |b| b.iter(|| riemann_zeta(black_box(&s), &cx).unwrap()));
    let s = point(&cx, 0.3, 2.0);
    c.bench_function("lerch e(2/7)", |b| b.iter(|| lerch_e(black_box(&s), 2, 7, &cx).unwrap()));
    c.bench_function("kloosterman l=499 five m", |b| b.iter(|| kloosterman_batch(black_box(&[1, 2, 3, 5, 12]), -1, 499, &cx).unwrap()));
    let a = point(&cx, 0.7, -0.4);
    c.bench_function("gaussian moment j=8", |b| b.iter(|| gaussian_moment(8, black_box(&a), &cx).unwrap()));
}

fn products(c: &mut Criterion) {
    let cx = bench_ctx();
    let mut g = c.benchmark_group("euler product");
    g.sample_size(10);
    g.bench_function("a_4 cutoff 1e4", |b| b.iter(|| arithmetic_ak(4, black_box(10_000), &cx).unwrap()));
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let cx = bench_ctx();
    let w = small_weight();
    let s = point(&cx, 0.2, 10.0);
    let mut g = c.benchmark_group("transforms");
    g.sample_size(10);
    g.bench_function("h* at 0.2+10i", |b| b.iter(|| h_star(black_box(&s), &w, &cx).unwrap()));
    g.finish();
}

criterion_group!(benches, special, products, transforms);
criterion_main!(benches);
