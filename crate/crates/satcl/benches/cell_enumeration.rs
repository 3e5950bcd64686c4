//! Parallel vs sequential throughput on the two data-parallel drivers:
//! cell enumeration (independent LPs per candidate sign vector) and the
//! multi-algorithm experiment runner.
//!
//! `enumerate_cells_with_stats` fans out over rayon when the default
//! `parallel` feature is on; `enumerate_cells_sequential` is the
//! fallback path, benchmarked here as the baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use satcl::algorithms::parse_algorithm;
use satcl::cl::{run, ClAlgorithm};
use satcl::harness::{
    default_criterion, generate, run_experiment_on_stream, scaling_arrangement, StreamKind,
    StreamSpec,
};
use satcl::rat::rat;

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_cells");
    group.sample_size(10);
    for q in [6usize, 8, 10] {
        let arr = scaling_arrangement(q, 2, 42).unwrap();
        group.bench_with_input(BenchmarkId::new("seq", q), &arr, |b, arr| {
            b.iter(|| satcl::equivalence::enumerate_cells_sequential(arr).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", q), &arr, |b, arr| {
            b.iter(|| satcl::equivalence::enumerate_cells_with_stats(arr).unwrap())
        });
    }
    group.finish();
}

fn bench_experiment(c: &mut Criterion) {
    let spec = StreamSpec {
        kind: StreamKind::PlantedFeasible,
        seed: 42,
        dim: 2,
        tasks: 5,
        n_per_task: 3,
        epsilon: rat(1, 2),
        margin: rat(1, 4),
    };
    let stream = generate(&spec).unwrap();
    let criterion = default_criterion(&spec);
    let algorithms: Vec<Box<dyn ClAlgorithm>> = ["exact", "replay", "reg:lambda=10"]
        .iter()
        .map(|a| parse_algorithm(a).unwrap())
        .collect();

    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    group.bench_function("driver", |b| {
        b.iter(|| run_experiment_on_stream(&stream, &algorithms, &criterion).unwrap())
    });
    group.bench_function("sequential_loop", |b| {
        b.iter(|| {
            algorithms
                .iter()
                .map(|alg| run(alg.as_ref(), &stream, &criterion).unwrap())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_enumeration, bench_experiment);
criterion_main!(benches);
