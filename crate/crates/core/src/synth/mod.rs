//! Environment and task synthesis.
//!
//! A [`DomainTemplate`] describes tables, tools and task intents. The pipeline
//! generates a database, instantiates tasks, optionally complicates them,
//! samples per-instance tool subsets and prices, attaches preference pairs and
//! filters out tasks that fail replay, cannot be solved by a bounded probe or
//! are solved without acting.

mod config;
mod domains;
mod filter;
mod preferences;
mod routing;
mod template;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{diversify, randomize_pricing, sample_tool_subset, InstanceConfig};
pub use domains::{all_domain_templates, domain_template, DOMAINS};
pub use filter::{filter_tasks, mutate_call, FilterStage, ProbeConfig, ProbePolicy, SynthReport};
pub use preferences::{check_pair, generate_preference_pairs, is_local_tool, Persona, PreferencePair, PERSONAS};
pub use routing::{route_options, routing_bundle, routing_catalog, RouteOption};
pub use template::{
    complicate_task, generate_environment, generate_tasks, render_value, Arg, Binding, CallTemplate, Complicated,
    Complication, DomainTemplate, FieldGen, IntentTemplate, TableTemplate,
};

use crate::env_sim::EnvBundle;
use crate::error::SynthError;
use crate::rewards::PreferenceProfile;
use crate::seed::mix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub tasks: usize,
    pub seed: u64,
    /// Chance that a generated task gets one complication.
    pub complicate_prob: f64,
    pub instance: InstanceConfig,
    pub probe: ProbeConfig,
    /// Number of preference pairs; tasks are assigned pairs round-robin.
    pub preference_pairs: usize,
    /// Table size overrides.
    #[serde(default)]
    pub sizes: BTreeMap<String, usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            tasks: 40,
            seed: 0,
            complicate_prob: 0.5,
            instance: InstanceConfig::default(),
            probe: ProbeConfig::default(),
            preference_pairs: 12,
            sizes: BTreeMap::new(),
        }
    }
}

/// Runs the whole pipeline for one domain.
pub fn synthesize(template: &DomainTemplate, cfg: &SynthConfig) -> Result<(EnvBundle, SynthReport), SynthError> {
    let (db, catalog) = generate_environment(template, &cfg.sizes, cfg.seed)?;
    let db = Arc::new(db);
    let generated = generate_tasks(&db, &catalog, template, cfg.tasks, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0x434f_4d50));
    let mut tasks = Vec::with_capacity(generated.len());
    for task in generated {
        let complicate = rng.random_bool(cfg.complicate_prob.clamp(0.0, 1.0))
            && task.instance_catalog(&catalog).is_ok_and(|v| task.replay_golden(&v).is_ok());
        if complicate {
            tasks.push(complicate_task(&task, &catalog, template, cfg.seed)?.into_task());
        } else {
            tasks.push(task);
        }
    }
    let mut tasks = diversify(&tasks, &catalog, &cfg.instance, cfg.seed);
    let pairs = generate_preference_pairs(&catalog, cfg.preference_pairs, cfg.seed);
    let catalog_ref = catalog.names().join(",");
    if !pairs.is_empty() {
        for (i, task) in tasks.iter_mut().enumerate() {
            let pair = &pairs[i % pairs.len()];
            task.preference = Some(
                PreferenceProfile::new(pair.instruction.clone(), pair.vector.clone(), catalog_ref.clone())
                    .with_pair_id(pair.pair_id.clone()),
            );
        }
    }
    let probe = ProbeConfig {
        seed: mix(cfg.seed, cfg.probe.seed),
        ..cfg.probe
    };
    let (kept, report) = filter_tasks(tasks, &catalog, &probe)?;
    Ok((
        EnvBundle {
            db,
            catalog,
            tasks: kept,
            preferences: pairs.iter().map(PreferencePair::to_line).collect(),
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env_sim::verify;
    use crate::rollout::{run_episode, Policy, PolicyDecision, PolicyInput, RolloutConfig};
    use rand_chacha::ChaCha8Rng;

    struct Mutated(usize);

    impl Policy for Mutated {
        fn decide(&self, input: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
            match input.task.golden_calls.get(input.turn_index as usize) {
                Some(call) if input.turn_index as usize == self.0 => PolicyDecision::Call {
                    reasoning: String::new(),
                    call: mutate_call(call, input.full_catalog, input.task).unwrap_or_else(|| call.clone()),
                },
                Some(call) => PolicyDecision::Call {
                    reasoning: String::new(),
                    call: call.clone(),
                },
                None => PolicyDecision::answer(input.task.golden_answer_text()),
            }
        }
    }

    #[test]
    fn every_domain_yields_solvable_tasks_and_mutations_fail() {
        for template in all_domain_templates() {
            let cfg = SynthConfig {
                tasks: 30,
                seed: 4,
                ..Default::default()
            };
            let (bundle, report) = synthesize(&template, &cfg).unwrap();
            assert!(report.is_conserved(), "{report:?}");
            assert!(report.surviving.len() >= 20, "{}: {report:?}", template.domain);
            let run_cfg = RolloutConfig::default();
            let (mut flipped, mut total) = (0, 0);
            for task in &bundle.tasks {
                for i in 0..task.golden_calls.len() {
                    total += 1;
                    let traj = run_episode(&Mutated(i), task, &bundle.catalog, &run_cfg).unwrap();
                    if !verify(task, &traj, &bundle.catalog).unwrap().solved {
                        flipped += 1;
                    } else {
                        eprintln!("{}: call {i} of {} survives mutation: {:?}", template.domain, task.task_id, task.golden_calls);
                    }
                }
            }
            assert!(flipped as f64 >= 0.95 * total as f64, "{}: {flipped}/{total}", template.domain);
        }
    }
}
