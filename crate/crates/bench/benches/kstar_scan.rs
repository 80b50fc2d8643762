use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kstar_bench::overlapped_space;
use kstar_core::{kstar_scan_oracle, kstar_scan_with, DistanceMetric, ScanOptions};

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("kstar_scan");
    group.sample_size(10);
    for &(n, dim) in &[(1_000, 64), (4_000, 64), (4_000, 512)] {
        let set = overlapped_space(n, dim);
        group.throughput(Throughput::Elements((n * n) as u64));
        for workers in [1, 0] {
            let opts = ScanOptions { workers, ..ScanOptions::default() };
            let id = BenchmarkId::new(format!("workers={workers}"), format!("{n}x{dim}"));
            group.bench_with_input(id, &set, |b, set| {
                b.iter(|| kstar_scan_with(set, DistanceMetric::Euclidean, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("kstar_scan_oracle");
    group.sample_size(10);
    let set = overlapped_space(1_000, 64);
    group.bench_function("1000x64", |b| b.iter(|| kstar_scan_oracle(&set, DistanceMetric::Euclidean).unwrap()));
    group.finish();
}

fn block_size(c: &mut Criterion) {
    let mut group = c.benchmark_group("block_rows");
    group.sample_size(10);
    let set = overlapped_space(4_000, 64);
    for block_rows in [1, 8, 32, 128] {
        let opts = ScanOptions { workers: 1, block_rows };
        group.bench_with_input(BenchmarkId::from_parameter(block_rows), &opts, |b, opts| {
            b.iter(|| kstar_scan_with(&set, DistanceMetric::Euclidean, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scan, oracle, block_size);
criterion_main!(benches);
