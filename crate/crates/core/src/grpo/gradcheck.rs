use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::objective::EPSILON;
use super::toy_policy::{DecisionPoint, ToyPolicy};
use super::trainer::{objective_and_grad, Sample};

/// Finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Denominator floor for relative errors of near-zero gradient components.
pub const REL_ERROR_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradCheck {
    pub max_rel_error: f64,
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

fn objective(policy: &ToyPolicy, samples: &[Sample], epsilon: f64) -> f64 {
    objective_and_grad(policy, samples, epsilon).map(|(o, _)| o.value).unwrap_or(f64::NAN)
}

/// Compares the analytic gradient of the clipped objective with central
/// finite differences of step `h`, returning the largest relative error.
pub fn gradient_check(policy: &ToyPolicy, samples: &[Sample], epsilon: f64, h: f64) -> GradCheck {
    let analytic = objective_and_grad(policy, samples, epsilon)
        .map(|(_, g)| g)
        .unwrap_or_else(|_| vec![f64::NAN; policy.weights.len()]);
    let mut probe = policy.clone();
    let numeric: Vec<f64> = (0..policy.weights.len())
        .map(|i| {
            let w = policy.weights[i];
            probe.weights[i] = w + h;
            let up = objective(&probe, samples, epsilon);
            probe.weights[i] = w - h;
            let down = objective(&probe, samples, epsilon);
            probe.weights[i] = w;
            (up - down) / (2.0 * h)
        })
        .collect();
    let max_rel_error = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(REL_ERROR_FLOOR))
        .fold(0.0, f64::max);
    GradCheck {
        max_rel_error,
        analytic,
        numeric,
    }
}

/// A seeded random policy and batch. Old log-probabilities are offset from
/// the current ones so that some terms fall in the clipped region, while every
/// ratio stays at least `margin` away from the clip boundaries (the objective
/// has kinks there).
pub fn random_fixture(seed: u64, n_tools: usize, n_samples: usize, margin: f64) -> (ToyPolicy, Vec<Sample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut policy = ToyPolicy::zeros(n_tools);
    for w in &mut policy.weights {
        *w = rng.random_range(-1.0..1.0);
    }
    policy.temperature = rng.random_range(0.5..2.0);
    let mut samples = Vec::with_capacity(n_samples);
    while samples.len() < n_samples {
        let n_points = rng.random_range(1..=3);
        let points: Vec<DecisionPoint> = (0..n_points)
            .map(|_| {
                let features: Vec<f64> = (0..policy.feature_dim)
                    .map(|_| if rng.random_bool(0.6) { rng.random_range(-1.0..1.0) } else { 0.0 })
                    .collect();
                let mut mask: Vec<bool> = (0..n_tools).map(|_| rng.random_bool(0.7)).collect();
                let forced = rng.random_range(0..n_tools);
                mask[forced] = true;
                let allowed: Vec<usize> = (0..n_tools).filter(|a| mask[*a]).collect();
                let action = allowed[rng.random_range(0..allowed.len())];
                DecisionPoint { features, mask, action }
            })
            .collect();
        let current = policy.trajectory_log_prob(&points);
        let offset: f64 = rng.random_range(-0.4..0.4);
        let ratio = offset.exp();
        if (ratio - (1.0 - EPSILON)).abs() < margin || (ratio - (1.0 + EPSILON)).abs() < margin {
            continue;
        }
        samples.push(Sample {
            points,
            advantage: rng.random_range(-2.0..2.0),
            old_log_prob: current - offset,
        });
    }
    (policy, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_matches_finite_differences() {
        let (policy, samples) = random_fixture(3, 4, 12, 1e-3);
        let check = gradient_check(&policy, &samples, EPSILON, FD_STEP);
        assert!(check.max_rel_error < 1e-4, "{}", check.max_rel_error);
    }

    #[test]
    fn zero_advantages_give_zero_gradient() {
        let (policy, mut samples) = random_fixture(4, 3, 6, 1e-3);
        for s in &mut samples {
            s.advantage = 0.0;
        }
        let (_, grad) = objective_and_grad(&policy, &samples, EPSILON).unwrap();
        assert!(grad.iter().all(|g| *g == 0.0));
    }
}
