use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use treelaw::sampler::{sample_mst_empirical, sample_orders, SamplerConfig};
use treelaw::shift_exact::ProductMeasureSpec;
use treelaw::Graph;

const SAMPLES: u64 = 20_000;

fn trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_mst");
    group.throughput(Throughput::Elements(SAMPLES));
    for n in [5usize, 10, 20] {
        let g = Graph::complete(n);
        let spec = ProductMeasureSpec::iid_uniform(g.m());
        let cfg = SamplerConfig::new(1, SAMPLES);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| sample_mst_empirical(&g, &spec, &cfg).unwrap())
        });
    }
    group.finish();
}

fn orders(c: &mut Criterion) {
    let spec = ProductMeasureSpec::iid_uniform(5);
    let cfg = SamplerConfig::new(1, SAMPLES);
    let mut group = c.benchmark_group("sample_orders");
    group.throughput(Throughput::Elements(SAMPLES));
    group.bench_function("m5", |b| b.iter(|| sample_orders(&spec, &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, trees, orders);
criterion_main!(benches);
