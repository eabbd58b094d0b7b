use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cliffwalk::oracle::{build_level_chain, expected_upgrade_times, solve_first_passage_linear};
use cliffwalk::{Alpha, Problem};

fn recursion(c: &mut Criterion) {
    let mut group = c.benchmark_group("upgrade-times");
    let alpha = Alpha::new(20.0).unwrap();
    for n in [100, 1000, 10_000] {
        let problem = Problem::cliff(n, 12, 3.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &problem, |b, p| {
            b.iter(|| black_box(expected_upgrade_times(&build_level_chain(p, alpha)).unwrap()))
        });
    }
    group.finish();
}

fn dense_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("first-passage-dense");
    group.sample_size(10);
    let alpha = Alpha::new(5.0).unwrap();
    for n in [32, 128, 256] {
        let chain = build_level_chain(&Problem::one_max(n).unwrap(), alpha);
        group.bench_with_input(BenchmarkId::from_parameter(n), &chain, |b, chain| {
            b.iter(|| black_box(solve_first_passage_linear(chain, 0).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, recursion, dense_solve);
criterion_main!(benches);
