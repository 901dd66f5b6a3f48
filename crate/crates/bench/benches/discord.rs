use std::hint::black_box;

use cdiscord::sampling::{random_channel, random_joint};
use cdiscord::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn discord(c: &mut Criterion) {
    let mut group = c.benchmark_group("classical_discord");
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for d in [2, 4, 8] {
        let p = random_joint(&mut rng, d, d);
        let m = random_channel(&mut rng, d);
        group.bench_with_input(BenchmarkId::from_parameter(d), &(p, m), |b, (p, m)| {
            b.iter(|| classical_discord(black_box(p), black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn stationary(c: &mut Criterion) {
    let mut group = c.benchmark_group("stationary_family");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in [2, 4, 8] {
        let m = random_channel(&mut rng, d);
        group.bench_with_input(BenchmarkId::from_parameter(d), &m, |b, m| {
            b.iter(|| stationary_family(black_box(m)).unwrap())
        });
    }
    let block = StochasticChannel::binary_symmetric(0.1)
        .unwrap()
        .direct_sum(&StochasticChannel::binary_symmetric(0.2).unwrap());
    group.bench_function("bsc_block", |b| b.iter(|| stationary_family(black_box(&block)).unwrap()));
    group.finish();
}

fn channel_polytope(c: &mut Criterion) {
    let mut group = c.benchmark_group("zero_discord_channels");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in [2, 3] {
        let p = JointDistribution::product(&vec![1.0 / d as f64; d], &vec![1.0 / d as f64; d]).unwrap();
        group.bench_with_input(BenchmarkId::new("uniform_product", d), &p, |b, p| {
            b.iter(|| zero_discord_channels(black_box(p)).unwrap())
        });
        let p = random_joint(&mut rng, d, d);
        group.bench_with_input(BenchmarkId::new("random", d), &p, |b, p| {
            b.iter(|| zero_discord_channels(black_box(p)).unwrap())
        });
    }
    let p = JointDistribution::product(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
    let poly = zero_discord_channels(&p).unwrap();
    group.bench_function("vertices_2x2", |b| b.iter(|| black_box(&poly).vertices().unwrap()));
    group.finish();
}

fn optimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("stochastic_discord");
    group.sample_size(10);
    let p = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
    let bsc = ChannelFamily::parametric_bsc(2, 0.1, 0.5).unwrap();
    group.bench_function("parametric_bsc", |b| {
        b.iter(|| stochastic_discord(black_box(&p), &bsc, 300, 0).unwrap())
    });
    let lower = ChannelFamily::entrywise_lower_bound(2, 0.05).unwrap();
    group.bench_function("entrywise_lower_bound", |b| {
        b.iter(|| stochastic_discord(black_box(&p), &lower, 300, 0).unwrap())
    });
    group.finish();
}

fn merging(c: &mut Criterion) {
    let mut group = c.benchmark_group("merging");
    group.bench_function("sweep_11x11", |b| b.iter(|| merging_sweep(black_box(11), 11).unwrap()));
    let m = StochasticChannel::binary_symmetric(0.2).unwrap();
    group.bench_function("identity_check", |b| {
        b.iter(|| verify_merging_identity(black_box(0.3), &m).unwrap())
    });
    group.finish();
}

criterion_group!(benches, discord, stationary, channel_polytope, optimizer, merging);
criterion_main!(benches);
