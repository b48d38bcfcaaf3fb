use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hessval::convexfn::{generate_pair, random_max_affine, random_window, PairFamily};
use hessval::fenchel::conjugate_grid;
use hessval::harness::suites::bundled_kernels;
use hessval::hessmeasure::HessianMeasureAtlas;
use hessval::valuation::hessian_valuation;
use hessval::GridSampled;

fn grid_conjugate(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_conjugate");
    for &count in &[1_000usize, 10_000] {
        let step = 4.0 / (count - 1) as f64;
        let g = GridSampled::sample(vec![-2.0], step, vec![count], |x| 0.5 * x[0] * x[0] + x[0].abs()).unwrap();
        group.bench_with_input(BenchmarkId::new("1d", count), &g, |b, g| b.iter(|| conjugate_grid(black_box(g)).unwrap()));
    }
    let g = GridSampled::sample(vec![-1.0, -1.0], 2.0 / 127.0, vec![128, 128], |x| x.norm_squared()).unwrap();
    group.bench_function("2d/128x128", |b| b.iter(|| conjugate_grid(black_box(&g)).unwrap()));
    group.finish();
}

fn atlas(c: &mut Criterion) {
    let mut group = c.benchmark_group("atlas");
    for dim in 1..=3 {
        let u = random_max_affine(dim, 11);
        group.bench_with_input(BenchmarkId::new("build", dim), &u, |b, u| b.iter(|| HessianMeasureAtlas::new(black_box(u)).unwrap()));
        let at = HessianMeasureAtlas::new(&u).unwrap();
        let w = random_window(dim, 5);
        group.bench_with_input(BenchmarkId::new("measures", dim), &(at, w), |b, (at, w)| {
            b.iter(|| at.measures(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn valuations(c: &mut Criterion) {
    let mut group = c.benchmark_group("valuation");
    group.sample_size(10);
    let pair = generate_pair(PairFamily::ALL[0], 2, 3);
    let u = pair.join().clone();
    for (name, kernel) in bundled_kernels() {
        group.bench_function(BenchmarkId::new(name, "2d"), |b| {
            b.iter(|| (0..=2).map(|i| hessian_valuation(&kernel, i, black_box(&u)).unwrap()).sum::<f64>())
        });
    }
    group.finish();
}

criterion_group!(benches, grid_conjugate, atlas, valuations);
criterion_main!(benches);
