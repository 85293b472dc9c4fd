use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use selfsim::automatic::{from_group_ring, DEFAULT_SYMBOL_CAP};
use selfsim::mealy::bundled;
use selfsim::recursion::level_matrix;
use selfsim::sequences::{kernel, thue_morse};
use selfsim::series::grigorchuk_diagonal_system;
use selfsim::triangular::{alpha, first_diagonal};
use selfsim_bench::grigorchuk_generator;

fn level_matrices(c: &mut Criterion) {
    let (g, b, basis) = grigorchuk_generator("b");
    let mut group = c.benchmark_group("level_matrix");
    for n in [6, 8, 9] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, &n| {
            bench.iter(|| level_matrix(&g, black_box(&b), n, &basis).unwrap())
        });
    }
    group.finish();
}

fn automatic(c: &mut Criterion) {
    let (g, b, basis) = grigorchuk_generator("b");
    let (_, d, _) = grigorchuk_generator("d");
    let mb = from_group_ring(&g, &b, &basis, DEFAULT_SYMBOL_CAP).unwrap();
    let md = from_group_ring(&g, &d, &basis, DEFAULT_SYMBOL_CAP).unwrap();
    c.bench_function("from_group_ring b", |bench| {
        bench.iter(|| from_group_ring(&g, black_box(&b), &basis, DEFAULT_SYMBOL_CAP).unwrap())
    });
    c.bench_function("automatic mul b*d", |bench| bench.iter(|| black_box(&mb).mul(&md).unwrap()));
    c.bench_function("automatic entry", |bench| {
        bench.iter(|| black_box(&mb).entry(black_box(123_456_789), black_box(123_456_790)))
    });
}

fn diagonals(c: &mut Criterion) {
    let g = bundled::grigorchuk();
    let b = g.generator("b").unwrap();
    c.bench_function("alpha b", |bench| bench.iter(|| alpha(&g, black_box(&b)).unwrap()));
    c.bench_function("first_diagonal 4096", |bench| bench.iter(|| first_diagonal(&g, &b, 4096).unwrap()));
    c.bench_function("diagonal system 64x128", |bench| {
        bench.iter(|| grigorchuk_diagonal_system(black_box(64), 128).unwrap())
    });
}

fn kernels(c: &mut Criterion) {
    let t = thue_morse();
    c.bench_function("thue-morse kernel", |bench| {
        bench.iter(|| kernel(|n| t.term(n).ok(), 2, black_box(64), 16).unwrap())
    });
}

criterion_group!(benches, level_matrices, automatic, diagonals, kernels);
criterion_main!(benches);
