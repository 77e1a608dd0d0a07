use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use twogroup::{analyze_all, fit_nuisance, infer, t_quantile, FitConfig, InferenceConfig};
use twogroup_bench::{fixture_dataset, fixture_sample};

fn fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_nuisance");
    let cfg = FitConfig::default();
    for (n0, n1) in [(10, 5), (40, 20), (50, 52), (320, 160)] {
        let sample = fixture_sample(n0, n1, 1);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{n0}x{n1}")),
            &sample,
            |b, s| b.iter(|| fit_nuisance(black_box(s), &cfg).unwrap()),
        );
    }
    group.finish();

    let sample = fixture_sample(40, 20, 2);
    let cfg = InferenceConfig::default();
    c.bench_function("infer/40x20", |b| {
        b.iter(|| infer(black_box(&sample), &cfg).unwrap())
    });
}

fn quantile(c: &mut Criterion) {
    c.bench_function("t_quantile", |b| {
        b.iter(|| {
            for nu in [1.5, 7.0, 42.0, 300.0] {
                black_box(t_quantile(black_box(0.975), nu).unwrap());
            }
        })
    });
}

fn batch(c: &mut Criterion) {
    let data = fixture_dataset(1000);
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    group.throughput(Throughput::Elements(data.markers.len() as u64));
    group.bench_function("analyze_all/1000", |b| {
        b.iter(|| analyze_all(black_box(&data), 0.05).unwrap())
    });
    group.finish();
}

criterion_group!(benches, fit, quantile, batch);
criterion_main!(benches);
