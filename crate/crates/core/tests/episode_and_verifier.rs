use conductor_core::env_sim::{verify, EnvBundle, TerminationReason};
use conductor_core::rewards::{metric_vector, outcome_reward, NormalizedExactMatch};
use conductor_core::rollout::{run_episode, run_group, AnswerImmediately, GoldenReplay, NeverAnswer, Scripted};
use conductor_core::synth::{domain_template, synthesize, SynthConfig};
use conductor_core::{PolicyDecision, RolloutConfig, RolloutError};

fn bundle(domain: &str) -> EnvBundle {
    let template = domain_template(domain).unwrap();
    let cfg = SynthConfig {
        tasks: 16,
        seed: 5,
        ..SynthConfig::default()
    };
    synthesize(&template, &cfg).unwrap().0
}

#[test]
fn golden_replay_meets_all_three_criteria() {
    for domain in ["ecommerce", "travel", "medicine"] {
        let b = bundle(domain);
        for task in &b.tasks {
            let traj = run_episode(&GoldenReplay, task, &b.catalog, &RolloutConfig::default()).unwrap();
            let report = verify(task, &traj, &b.catalog).unwrap();
            assert!(report.execution_correctness, "{}", task.task_id);
            assert!(report.process_fidelity, "{}", task.task_id);
            assert!(report.operation_completeness, "{}", task.task_id);
            assert!(report.solved);
        }
    }
}

#[test]
fn silent_answer_fails_fidelity() {
    let b = bundle("ecommerce");
    let task = b.tasks.iter().find(|t| !t.required_info.is_empty()).unwrap();
    let traj = run_episode(&AnswerImmediately(String::new()), task, &b.catalog, &RolloutConfig::default()).unwrap();
    let report = verify(task, &traj, &b.catalog).unwrap();
    assert!(!report.process_fidelity);
    assert!(!report.solved);
}

#[test]
fn verifier_rejects_foreign_trajectory() {
    let b = bundle("ecommerce");
    let traj = run_episode(&GoldenReplay, &b.tasks[0], &b.catalog, &RolloutConfig::default()).unwrap();
    assert!(verify(&b.tasks[1], &traj, &b.catalog).is_err());
}

#[test]
fn episodes_do_not_leak_state_into_the_task() {
    let b = bundle("travel");
    let task = &b.tasks[0];
    let before = (*task.initial_db).clone();
    let _ = run_episode(&GoldenReplay, task, &b.catalog, &RolloutConfig::default()).unwrap();
    assert_eq!(*task.initial_db, before);
    assert_eq!(task.fork_initial_state().db, before);
}

#[test]
fn immediate_answer_takes_one_turn_and_costs_nothing() {
    let b = bundle("ecommerce");
    let traj = run_episode(&AnswerImmediately("done".into()), &b.tasks[0], &b.catalog, &RolloutConfig::default()).unwrap();
    assert_eq!(traj.turns.len(), 1);
    assert_eq!(traj.termination_reason, TerminationReason::AnswerEmitted);
    assert_eq!(traj.totals.cost, 0.0);
    assert!(traj.totals.tool_counts.iter().all(|&c| c == 0));
    assert_eq!(traj.final_answer(), Some("done"));
}

#[test]
fn never_answering_policy_hits_the_turn_cap() {
    let b = bundle("ecommerce");
    let task = &b.tasks[0];
    let never = NeverAnswer {
        call: task.golden_calls[0].clone(),
    };
    let traj = run_episode(&never, task, &b.catalog, &RolloutConfig::default()).unwrap();
    assert_eq!(traj.turns.len(), 50);
    assert_eq!(traj.termination_reason, TerminationReason::MaxTurns);
    assert_eq!(traj.totals.tool_counts.iter().sum::<u64>(), 50);
    let prefix = traj.cost_prefix();
    assert!(prefix.windows(2).all(|w| w[1] >= w[0]));
    let verdict = outcome_reward(task, &traj, &b.catalog, &NormalizedExactMatch).unwrap();
    assert!(!verdict.outcome);
    assert!(verdict.invalid_output);
}

#[test]
fn malformed_output_ends_the_episode() {
    let b = bundle("ecommerce");
    let task = &b.tasks[0];
    let policy = Scripted {
        steps: vec![PolicyDecision::call("no_such_tool", serde_json::json!({}))],
        fallback: String::new(),
    };
    let traj = run_episode(&policy, task, &b.catalog, &RolloutConfig::default()).unwrap();
    assert_eq!(traj.turns.len(), 1);
    assert_eq!(traj.termination_reason, TerminationReason::FormatViolation);
    assert!(traj.has_format_violation());
}

#[test]
fn groups_are_seeded_and_reject_singletons() {
    let b = bundle("medicine");
    let task = &b.tasks[0];
    let cfg = RolloutConfig::default();
    let a = run_group(&GoldenReplay, task, &b.catalog, &cfg, 4).unwrap();
    let c = run_group(&GoldenReplay, task, &b.catalog, &cfg, 4).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
    assert!(matches!(
        run_group(&GoldenReplay, task, &b.catalog, &cfg, 1),
        Err(RolloutError::GroupTooSmall(1))
    ));
}

#[test]
fn metric_vector_layout() {
    let b = bundle("travel");
    let task = &b.tasks[0];
    let traj = run_episode(&GoldenReplay, task, &b.catalog, &RolloutConfig::default()).unwrap();
    let v = metric_vector(&traj, &b.catalog, true).unwrap();
    let n = b.catalog.len();
    assert_eq!(v.0.len(), n + 3);
    assert_eq!(v.0[..n].iter().sum::<f64>(), task.golden_calls.len() as f64);
    assert_eq!(v.0[n], 1.0);
    assert_eq!(v.0[n + 1], -traj.totals.cost);
    assert_eq!(v.0[n + 2], -traj.totals.latency);
}
