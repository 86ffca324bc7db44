use std::time::Instant;

use conductor_core::grpo::bandit::{analytic_argmax, bandit_env, bandit_preference, BanditSpec, CHEAP, EXPENSIVE};
use conductor_core::grpo::{train_toy_policy, ToyPolicy, TrainConfig};

fn train(spec: BanditSpec, preference: Vec<f64>, steps: usize) -> (f64, usize) {
    let (catalog, tasks) = bandit_env(&spec, &preference);
    let mut policy = ToyPolicy::zeros(catalog.len());
    let cfg = TrainConfig {
        steps,
        learning_rate: 0.5,
        seed: 11,
        tasks_per_step: 4,
        ..TrainConfig::default()
    };
    let metrics = train_toy_policy(&mut policy, &tasks, &catalog, &cfg, 0, |_, _| {}).unwrap();
    let dist = policy.first_turn_distribution(&tasks[0], &catalog);
    let accepted = metrics.iter().filter(|m| m.update.step_accepted).count();
    (dist[CHEAP], accepted)
}

#[test]
fn cost_preference_learns_cheap_tool() {
    let spec = BanditSpec::new(0.95);
    let p = bandit_preference(1.0, 1.0, 0.0);
    assert_eq!(analytic_argmax(&spec, &p, 8), CHEAP);
    let t = Instant::now();
    let (cheap, accepted) = train(spec, p, 200);
    eprintln!("cheap prob {cheap} accepted {accepted} in {:?}", t.elapsed());
    assert!(cheap >= 0.9);
}

#[test]
fn accuracy_preference_learns_expensive_tool() {
    let spec = BanditSpec::new(0.6);
    let p = bandit_preference(1.0, 0.0, 0.0);
    assert_eq!(analytic_argmax(&spec, &p, 8), EXPENSIVE);
    let t = Instant::now();
    let (cheap, accepted) = train(spec, p, 200);
    eprintln!("expensive prob {} accepted {accepted} in {:?}", 1.0 - cheap, t.elapsed());
    assert!(1.0 - cheap >= 0.9);
}
