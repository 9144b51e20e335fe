//! Parallel vs sequential throughput of the sampling campaigns.

use criterion::{criterion_group, criterion_main, Criterion};
use lipscale::axioms::estimate_smoothing_constants;
use lipscale::exec::ExecMode;
use lipscale::nosmoothing::sign_correlation_sum;
use lipscale::scale::{Scale, SobolevSmoothing};
use lipscale::whitney::{dist_to_set, partition_jets, ClosedSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut out = vec![("sequential", ExecMode::Sequential)];
    #[cfg(feature = "parallel")]
    out.push(("parallel", ExecMode::Parallel));
    out
}

fn bench_smoothing_constants(c: &mut Criterion) {
    let scale = Scale::SobolevTorus {
        dim: 2,
        smoothing: SobolevSmoothing::BracketSharp,
        a0: 0.0,
    };
    let pairs = [(0.0, 1.0), (0.5, 2.0), (1.0, 3.0)];
    let mut group = c.benchmark_group("smoothing_constants");
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let report = estimate_smoothing_constants(&scale, 200, 42, &pairs, mode).unwrap();
                black_box(report.pairs.len())
            })
        });
    }
    group.finish();
}

fn bench_partition_sampling(c: &mut Criterion) {
    let set = ClosedSet::new(vec![
        vec![0.0, 0.0],
        vec![1.0, -0.5],
        vec![-1.5, 0.75],
        vec![0.25, 2.0],
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points: Vec<Vec<f64>> = (0..1000)
        .map(|_| loop {
            let x = vec![
                rng.random_range(-4.0f64..4.0),
                rng.random_range(-4.0f64..4.0),
            ];
            if dist_to_set(&x, &set) > 1e-3 {
                break x;
            }
        })
        .collect();
    let mut group = c.benchmark_group("partition_sampling");
    group.sample_size(20);
    for (name, mode) in modes() {
        let set = &set;
        let points = &points;
        group.bench_function(name, |b| {
            b.iter(|| {
                let sums = lipscale::exec::map_collect(mode, points, |x| {
                    let jets = partition_jets(x, set, 3).unwrap();
                    jets.iter().map(|(_, jet)| jet.value()).sum::<f64>()
                });
                black_box(sums.len())
            })
        });
    }
    group.finish();
}

fn bench_sign_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sign_sweep_n18");
    group.sample_size(20);
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| black_box(sign_correlation_sum(18, 3, 3, mode).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_smoothing_constants,
    bench_partition_sampling,
    bench_sign_sweep
);
criterion_main!(benches);
