use std::hint::black_box;

use carleman::par::{map_indexed, map_indexed_serial};
use carleman::verify::{run_check, CheckParams, Generator};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const N: usize = 32;

fn bench_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for (check, generator) in [("FACTOR", "traceless:6"), ("T3_IDENTITY", "cartwright:1-40")] {
        let g: Generator = generator.parse().unwrap();
        let params = CheckParams::with_p(1.5);
        let eval = |k: usize| {
            run_check(check, &g.generate(7, k as u64), &params)
                .map(|r| r.residual)
                .ok()
        };
        group.bench_with_input(BenchmarkId::new("parallel", check), &N, |b, &n| {
            b.iter(|| black_box(map_indexed(n, eval)))
        });
        group.bench_with_input(BenchmarkId::new("serial", check), &N, |b, &n| {
            b.iter(|| black_box(map_indexed_serial(n, eval)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_paths);
criterion_main!(benches);
