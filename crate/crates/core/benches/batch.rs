use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqhc::batch::map_indices_sequential;
use dqhc::preset;
use dqhc::sim::run_summary;
use std::hint::black_box;

const RUNS: [usize; 2] = [8, 32];

fn monte_carlo(c: &mut Criterion) {
    let mut scenario = preset("fig3_compare").unwrap();
    scenario.integration.t_final = 10.0;
    let one = |i: usize| run_summary(&scenario, i as u64).unwrap().jumps;

    let mut group = c.benchmark_group("monte_carlo_fig3_10s");
    group.sample_size(10);
    for n in RUNS {
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| black_box(map_indices_sequential(n, one)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| black_box(dqhc::batch::map_indices_parallel(n, one)))
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo);
criterion_main!(benches);
