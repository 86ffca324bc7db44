use conductor_core::env_sim::EnvBundle;
use conductor_core::rollout::{read_trajectories, run_episode, write_trajectories, GoldenReplay};
use conductor_core::synth::{domain_template, routing_bundle, synthesize, SynthConfig};
use conductor_core::RolloutConfig;

#[test]
fn bundle_survives_save_and_load() {
    let template = domain_template("ecommerce").unwrap();
    let (bundle, _) = synthesize(
        &template,
        &SynthConfig {
            tasks: 8,
            seed: 3,
            ..SynthConfig::default()
        },
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    bundle.save(dir.path()).unwrap();
    let loaded = EnvBundle::load(dir.path()).unwrap();
    assert_eq!(loaded.tasks.len(), bundle.tasks.len());
    assert_eq!(loaded.catalog.len(), bundle.catalog.len());
    for (a, b) in bundle.tasks.iter().zip(&loaded.tasks) {
        assert_eq!(a.task_id, b.task_id);
        assert_eq!(a.golden_calls, b.golden_calls);
        assert_eq!(*a.initial_db, *b.initial_db);
    }
    let again = tempfile::tempdir().unwrap();
    loaded.save(again.path()).unwrap();
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let (x, y) = (dir.path().join(&name), again.path().join(&name));
        if x.is_file() {
            assert!(std::fs::read(x).unwrap() == std::fs::read(y).unwrap(), "{name:?} differs");
        }
    }
}

#[test]
fn trajectories_round_trip_exactly() {
    let bundle = routing_bundle(4, 8, 2);
    let cfg = RolloutConfig::default();
    let trajs: Vec<_> = bundle
        .tasks
        .iter()
        .map(|t| run_episode(&GoldenReplay, t, &bundle.catalog, &cfg).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    write_trajectories(&path, &trajs).unwrap();
    let back = read_trajectories(&path).unwrap();
    assert_eq!(back, trajs);
}

#[test]
fn loading_a_missing_bundle_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(EnvBundle::load(&dir.path().join("absent")).is_err());
}
