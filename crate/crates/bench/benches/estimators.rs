use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use moran_core::auxiliary::{build_aux, monte_carlo_local_dims, strong_law_sequence, TargetMeasure};
use moran_core::estimators::{
    large_deviation_count, local_dim_trajectory, partition_sum, LevelSampler, PeriodicAddress,
};
use moran_core::{AuxTarget, ModelParams, Word};

fn partition(c: &mut Criterion) {
    let m = ModelParams::reference();
    let n8 = m.schedule().breakpoint(8).unwrap();
    c.bench_function("partition_sum_n8", |b| b.iter(|| partition_sum(&m, black_box(n8), 2.0).unwrap()));
}

fn deviation(c: &mut Criterion) {
    let m = ModelParams::reference();
    let mut g = c.benchmark_group("large_deviation_count");
    for n in [100u128, 512, 4096] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| large_deviation_count(&m, n, 0.2, 0.3, 0.01).unwrap())
        });
    }
    g.finish();
}

fn trajectories(c: &mut Criterion) {
    let m = ModelParams::reference();
    let levels = LevelSampler::new(m.schedule(), 8).unwrap().levels();
    let x = PeriodicAddress::new(Word::new(vec![0, 0, 1]).unwrap());
    c.bench_function("local_dim_trajectory_depth8", |b| {
        b.iter(|| local_dim_trajectory(&m, &x, &levels, &[]).unwrap())
    });
    let aux = build_aux(&m, AuxTarget::LowerHLinear(0.25)).unwrap();
    c.bench_function("strong_law_depth8", |b| {
        b.iter(|| strong_law_sequence(&m, &aux, TargetMeasure::Mu, &levels).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let m = ModelParams::reference();
    let aux = build_aux(&m, AuxTarget::Mu).unwrap();
    let n5 = m.schedule().breakpoint(5).unwrap();
    let checkpoints: Vec<_> = (1..=5).map(|i| m.schedule().breakpoint(i).unwrap()).collect();
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("mc_1000_depth_n5", |b| {
        b.iter(|| monte_carlo_local_dims(&m, &aux, n5, &checkpoints, 1000, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, partition, deviation, trajectories, monte_carlo);
criterion_main!(benches);
