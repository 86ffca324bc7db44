//! Per-instance tool subsets and pricing.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env_sim::TaskSpec;
use crate::seed::{hash_seed, mix};
use crate::tool_registry::{PricingEntry, ToolCatalog};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    /// Probability that a tool not used by the golden calls stays available.
    pub keep_prob: f64,
    /// Pricing factors are drawn log-uniformly from this range.
    pub price_factor_min: f64,
    pub price_factor_max: f64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            keep_prob: 0.7,
            price_factor_min: 0.25,
            price_factor_max: 4.0,
        }
    }
}

/// Tools kept for one instance, in catalog order. Golden tools are always kept.
pub fn sample_tool_subset(task: &TaskSpec, catalog: &ToolCatalog, keep_prob: f64, rng: &mut ChaCha8Rng) -> Vec<String> {
    catalog
        .names()
        .into_iter()
        .filter(|name| {
            let golden = task.golden_calls.iter().any(|c| &c.tool_name == name);
            // Draw for every tool so the stream does not depend on which are golden.
            let keep = rng.random_bool(keep_prob.clamp(0.0, 1.0));
            golden || keep
        })
        .collect()
}

/// One log-uniform factor per pricing reference of `catalog`.
pub fn randomize_pricing(catalog: &ToolCatalog, min: f64, max: f64, rng: &mut ChaCha8Rng) -> BTreeMap<String, PricingEntry> {
    let (lo, hi) = (min.ln(), max.ln());
    catalog
        .pricing_table()
        .iter()
        .map(|(name, entry)| {
            let factor = if hi > lo { rng.random_range(lo..hi).exp() } else { min };
            (name.clone(), entry.scaled(factor))
        })
        .collect()
}

/// Applies a tool subset and randomized pricing to each task.
pub fn diversify(tasks: &[TaskSpec], catalog: &ToolCatalog, cfg: &InstanceConfig, seed: u64) -> Vec<TaskSpec> {
    tasks
        .iter()
        .map(|task| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, hash_seed(3, task.task_id.as_bytes())));
            let mut out = task.clone();
            out.available_tools = sample_tool_subset(task, catalog, cfg.keep_prob, &mut rng);
            out.pricing = Some(randomize_pricing(catalog, cfg.price_factor_min, cfg.price_factor_max, &mut rng));
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::domains::domain_template;
    use crate::synth::template::{generate_environment, generate_tasks};
    use std::sync::Arc;

    #[test]
    fn golden_tools_survive_and_prices_stay_in_range() {
        let t = domain_template("travel").unwrap();
        let (db, catalog) = generate_environment(&t, &Default::default(), 1).unwrap();
        let tasks = generate_tasks(&Arc::new(db), &catalog, &t, 30, 1).unwrap();
        let out = diversify(&tasks, &catalog, &InstanceConfig::default(), 9);
        for (before, after) in tasks.iter().zip(&out) {
            for c in &before.golden_calls {
                assert!(after.is_available(&c.tool_name));
            }
            for (name, p) in after.pricing.as_ref().unwrap() {
                let base = catalog.pricing_table()[name];
                for (a, b) in [(p.input_per_m, base.input_per_m), (p.output_per_m, base.output_per_m), (p.flat, base.flat)] {
                    if b > 0.0 {
                        assert!((0.25..=4.0).contains(&(a / b)), "{name}: {}", a / b);
                    }
                }
            }
        }
        assert!(out.iter().any(|t| t.available_tools.len() < catalog.len()));
    }
}
