use conductor_bench::domain_bundle;
use conductor_core::env_sim::verify;
use conductor_core::grpo::ToyPolicy;
use conductor_core::rollout::{run_episode, run_group, GoldenReplay, NeverAnswer};
use conductor_core::RolloutConfig;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_episodes(c: &mut Criterion) {
    let bundle = domain_bundle("ecommerce", 12);
    let task = &bundle.tasks[0];
    let cfg = RolloutConfig::default();

    c.bench_function("golden_episode", |b| {
        b.iter(|| run_episode(&GoldenReplay, black_box(task), &bundle.catalog, &cfg).unwrap())
    });

    let never = NeverAnswer {
        call: task.golden_calls[0].clone(),
    };
    c.bench_function("capped_episode_50_turns", |b| {
        b.iter(|| run_episode(&never, black_box(task), &bundle.catalog, &cfg).unwrap())
    });

    let toy = ToyPolicy::zeros(bundle.catalog.len());
    c.bench_function("toy_group_of_8", |b| {
        b.iter(|| run_group(&toy, black_box(task), &bundle.catalog, &cfg, 8).unwrap())
    });

    let traj = run_episode(&GoldenReplay, task, &bundle.catalog, &cfg).unwrap();
    c.bench_function("verify_golden", |b| {
        b.iter(|| verify(black_box(task), black_box(&traj), &bundle.catalog).unwrap())
    });
}

criterion_group!(benches, bench_episodes);
criterion_main!(benches);
