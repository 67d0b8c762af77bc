use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use semfeat_bench::corpus;
use semfeat_core::oracle::naive_segmentation_features;
use semfeat_core::segmentation_features;

fn segmentation(c: &mut Criterion) {
    let mut group = c.benchmark_group("segmentation_features");
    for categories in [8u16, 37] {
        let masks = corpus(8, 224, categories, 1);
        group.throughput(Throughput::Elements((masks.len() * 224 * 224) as u64));
        group.bench_with_input(
            BenchmarkId::new("single_pass", categories),
            &masks,
            |b, masks| b.iter(|| masks.iter().map(segmentation_features).count()),
        );
        group.bench_with_input(
            BenchmarkId::new("per_category", categories),
            &masks,
            |b, masks| b.iter(|| masks.iter().map(naive_segmentation_features).count()),
        );
    }
    group.finish();
}

criterion_group!(benches, segmentation);
criterion_main!(benches);
