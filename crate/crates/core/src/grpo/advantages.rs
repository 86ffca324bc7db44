use serde::{Deserialize, Serialize};

use super::filters::FilterReason;
use crate::error::GrpoError;

/// Below this population standard deviation a group is degenerate and all
/// advantages are zero.
pub const DEGENERATE_STD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupAdvantages {
    pub rewards: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub advantages: Vec<f64>,
    pub degenerate: bool,
    pub filtered: bool,
    pub filter_reason: Option<FilterReason>,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-pass population standard deviation.
pub fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Standardizes rewards within their group: `(R - mean) / std`.
pub fn group_advantages(rewards: &[f64]) -> Result<GroupAdvantages, GrpoError> {
    if rewards.len() < 2 {
        return Err(GrpoError::GroupTooSmall(rewards.len()));
    }
    if let Some(i) = rewards.iter().position(|r| !r.is_finite()) {
        return Err(GrpoError::NonFinite(i));
    }
    let mean = mean(rewards);
    let std = population_std(rewards);
    let degenerate = std < DEGENERATE_STD;
    let advantages = if degenerate {
        vec![0.0; rewards.len()]
    } else {
        rewards.iter().map(|r| (r - mean) / std).collect()
    };
    Ok(GroupAdvantages {
        rewards: rewards.to_vec(),
        mean,
        std,
        advantages,
        degenerate,
        filtered: false,
        filter_reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        let g = group_advantages(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(g.mean, 0.5);
        assert_eq!(g.std, 0.5);
        assert_eq!(g.advantages, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn constant_group_is_degenerate() {
        let g = group_advantages(&[0.3; 5]).unwrap();
        assert!(g.degenerate);
        assert!(g.advantages.iter().all(|a| *a == 0.0));
        assert!(group_advantages(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn standardized(rewards in prop::collection::vec(-5.0f64..5.0, 2..32), scale in 0.1f64..10.0, shift in -3.0f64..3.0) {
            let g = group_advantages(&rewards).unwrap();
            prop_assume!(g.std > 1e-6);
            let n = rewards.len() as f64;
            prop_assert!(g.advantages.iter().sum::<f64>().abs() < 1e-9 * n);
            prop_assert!((population_std(&g.advantages) - 1.0).abs() < 1e-9);
            let moved: Vec<f64> = rewards.iter().map(|r| r * scale + shift).collect();
            let h = group_advantages(&moved).unwrap();
            for (a, b) in g.advantages.iter().zip(&h.advantages) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
