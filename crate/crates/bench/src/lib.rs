//! Fixtures shared by the benchmarks.

use conductor_core::rewards::RawMetricVector;
use conductor_core::synth::{domain_template, synthesize, SynthConfig};
use conductor_core::env_sim::EnvBundle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `size` metric vectors over `tools` tools plus a preference vector.
pub fn metric_batch(size: usize, tools: usize, seed: u64) -> (Vec<RawMetricVector>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = (0..size)
        .map(|_| {
            let mut v: Vec<f64> = (0..tools).map(|_| f64::from(rng.random_range(0..5u32))).collect();
            v.push(f64::from(rng.random_range(0..2u32)));
            v.push(-rng.random_range(0.0..0.05));
            v.push(-rng.random_range(0.0..10.0));
            RawMetricVector(v)
        })
        .collect();
    let preference = (0..tools + 3).map(|_| rng.random_range(0.0..1.0)).collect();
    (batch, preference)
}

/// A small synthesized domain bundle.
pub fn domain_bundle(domain: &str, tasks: usize) -> EnvBundle {
    let template = domain_template(domain).expect("known domain");
    let cfg = SynthConfig {
        tasks,
        seed: 1,
        ..SynthConfig::default()
    };
    synthesize(&template, &cfg).expect("synthesis succeeds").0
}
