use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mdep_bench::{fixture, normal_linear};
use mdep_core::blml::{bin_1d, bin_2d, gram_matrix, merge_duplicates_1d, solve_blml};
use mdep_core::numerics::NewtonOptions;

fn solver(c: &mut Criterion) {
    let model = normal_linear(0.6);
    let fc = model.rho_cutoff();
    let opts = NewtonOptions::default();
    let mut group = c.benchmark_group("blml");
    group.sample_size(10);

    let sample = fixture(&model, 10_000);
    let b1 = bin_1d(sample.xs(), fc).unwrap();
    let b2 = bin_2d(sample.xs(), sample.ys(), fc).unwrap();
    group.bench_function("binned_1d", |b| b.iter(|| solve_blml(&b1.points, &b1.weights, fc, &opts).unwrap()));
    group.bench_function(BenchmarkId::new("binned_2d", b2.weights.len()), |b| {
        b.iter(|| solve_blml(&b2.points, &b2.weights, fc, &opts).unwrap())
    });

    for n in [100, 300, 1000] {
        let s = fixture(&model, n);
        let m = merge_duplicates_1d(s.xs()).unwrap();
        group.bench_with_input(BenchmarkId::new("unbinned_1d", n), &m, |b, m| {
            b.iter(|| solve_blml(&m.points, &m.weights, fc, &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gram_1d", n), &m, |b, m| b.iter(|| gram_matrix(&m.points, fc).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, solver);
criterion_main!(benches);
