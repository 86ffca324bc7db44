use conductor_bench::metric_batch;
use conductor_core::grpo::group_advantages;
use conductor_core::rewards::{eval_reward, final_reward, normalize_batch};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_normalize(c: &mut Criterion) {
    let mut group = c.benchmark_group("normalize_and_reward");
    for size in [8usize, 64, 512] {
        let (batch, p) = metric_batch(size, 12, 7);
        group.bench_with_input(BenchmarkId::from_parameter(size), &batch, |b, batch| {
            b.iter(|| {
                let normalized = normalize_batch(black_box(batch)).unwrap();
                normalized
                    .vectors
                    .iter()
                    .map(|v| final_reward(v, &p, true).unwrap())
                    .sum::<f64>()
            })
        });
    }
    group.finish();
}

fn bench_advantages(c: &mut Criterion) {
    let rewards: Vec<f64> = (0..8).map(|i| f64::from(i) * 0.13).collect();
    c.bench_function("group_advantages_8", |b| b.iter(|| group_advantages(black_box(&rewards)).unwrap()));
}

fn bench_eval_reward(c: &mut Criterion) {
    let (batch, p) = metric_batch(2, 12, 3);
    let cur: Vec<f64> = batch[0].0.iter().map(|x| x.abs()).collect();
    let base: Vec<f64> = batch[1].0.iter().map(|x| x.abs()).collect();
    c.bench_function("eval_reward", |b| {
        b.iter(|| eval_reward(black_box(&cur), black_box(&base), &p, true).unwrap())
    });
}

criterion_group!(benches, bench_normalize, bench_advantages, bench_eval_reward);
criterion_main!(benches);
