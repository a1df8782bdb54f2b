use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gwp_bench::classes;
use gwp_core::correspondence::{bar_i, BarOptions};
use gwp_core::kmatrix::KMatrix;
use gwp_core::partitions::enumerate_set_partitions;
use gwp_core::{expand_change_of_variables, QRational};
use std::hint::black_box;

fn set_partitions(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_set_partitions");
    for n in [6usize, 8, 10] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| enumerate_set_partitions(black_box(n), 12).unwrap().len())
        });
    }
    g.finish();
}

fn standard_rule(c: &mut Criterion) {
    let mut g = c.benchmark_group("bar_i");
    g.sample_size(20);
    for l in [3usize, 4, 5, 6] {
        let parts: Vec<u32> = (0..l).map(|j| if j % 2 == 0 { 2 } else { 1 }).collect();
        let size: u32 = parts.iter().sum();
        let k = KMatrix::random_admissible(size, (-1, 1), 7);
        let (_, cls) = classes(l);
        let opts = BarOptions::default();
        g.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, _| {
            b.iter(|| bar_i(black_box(&parts), &cls, &k, &opts).unwrap().len())
        });
    }
    g.finish();
}

fn change_of_variables(c: &mut Criterion) {
    // (1 + q)^3 (1 − 2q) in the denominator
    let f = QRational::parse("(q^3 - 2*q + 5)/(1 + q - 3*q^2 - 5*q^3 - 2*q^4)").unwrap();
    let mut g = c.benchmark_group("expand_change_of_variables");
    for n in [4i64, 8, 16] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| expand_change_of_variables(black_box(&f), 3, n).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, set_partitions, standard_rule, change_of_variables);
criterion_main!(benches);
