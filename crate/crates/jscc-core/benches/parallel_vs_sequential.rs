//! Chunked Monte Carlo under both schedules. The point of the comparison
//! is not just speedup: the two schedules must produce bit-identical rows
//! (asserted in the test suite), so any gap here is pure scheduling cost.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jscc_core::{run_point_with, Execution, SchemeConfig, SourceSpec};

fn bench_point_schedules(c: &mut Criterion) {
    let src = SourceSpec::gaussian_unit();
    let cfg = SchemeConfig::new(2, 1e4, &src)
        .unwrap()
        .with_epsilon(0.3)
        .unwrap();

    let mut group = c.benchmark_group("run_point");
    group.sample_size(10);
    for &samples in &[65_536u64, 262_144] {
        group.bench_with_input(
            BenchmarkId::new("sequential", samples),
            &samples,
            |b, &samples| {
                b.iter(|| run_point_with(&cfg, &src, samples, 7, Execution::Sequential).unwrap())
            },
        );
        group.bench_with_input(
            BenchmarkId::new("parallel", samples),
            &samples,
            |b, &samples| {
                b.iter(|| run_point_with(&cfg, &src, samples, 7, Execution::Parallel).unwrap())
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_point_schedules);
criterion_main!(benches);
