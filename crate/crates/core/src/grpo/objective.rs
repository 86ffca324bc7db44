use serde::{Deserialize, Serialize};

use crate::error::GrpoError;

/// Default clipping range.
pub const EPSILON: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDiagnostics {
    pub ratio: f64,
    pub term: f64,
    /// The clipped branch was strictly smaller, so the term is constant in the
    /// new log-probability.
    pub clipped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub value: f64,
    pub terms: Vec<TermDiagnostics>,
    pub clip_fraction: f64,
    pub ratio_stats: RatioStats,
}

/// Mean over trajectories of `min(r·A, clip(r, 1-ε, 1+ε)·A)` with
/// `r = exp(new - old)`.
pub fn clipped_objective(old: &[f64], new: &[f64], advantages: &[f64], epsilon: f64) -> Result<ObjectiveValue, GrpoError> {
    if old.len() != new.len() || old.len() != advantages.len() {
        return Err(GrpoError::LengthMismatch(format!(
            "{} old, {} new, {} advantages",
            old.len(),
            new.len(),
            advantages.len()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(GrpoError::InvalidConfig("epsilon must be positive".into()));
    }
    if let Some(i) = old.iter().chain(new).position(|x| !x.is_finite()) {
        return Err(GrpoError::NonFinite(i % old.len().max(1)));
    }
    let terms: Vec<TermDiagnostics> = old
        .iter()
        .zip(new)
        .zip(advantages)
        .map(|((o, n), &a)| {
            let ratio = (n - o).exp();
            let unclipped = ratio * a;
            let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon) * a;
            TermDiagnostics {
                ratio,
                term: unclipped.min(clipped),
                clipped: clipped < unclipped,
            }
        })
        .collect();
    let n = terms.len().max(1) as f64;
    let value = terms.iter().map(|t| t.term).sum::<f64>() / n;
    let clip_fraction = terms.iter().filter(|t| t.clipped).count() as f64 / n;
    let ratio_stats = if terms.is_empty() {
        RatioStats {
            min: 1.0,
            mean: 1.0,
            max: 1.0,
        }
    } else {
        RatioStats {
            min: terms.iter().map(|t| t.ratio).fold(f64::INFINITY, f64::min),
            mean: terms.iter().map(|t| t.ratio).sum::<f64>() / n,
            max: terms.iter().map(|t| t.ratio).fold(f64::NEG_INFINITY, f64::max),
        }
    };
    Ok(ObjectiveValue {
        value,
        terms,
        clip_fraction,
        ratio_stats,
    })
}

/// Derivative of each term with respect to its new log-probability, divided by
/// the number of terms (the objective is a mean).
pub fn term_gradients(objective: &ObjectiveValue, advantages: &[f64]) -> Vec<f64> {
    let n = objective.terms.len().max(1) as f64;
    objective
        .terms
        .iter()
        .zip(advantages)
        .map(|(t, a)| if t.clipped { 0.0 } else { t.ratio * a / n })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_policy_gives_mean_advantage() {
        let lp = [-1.0, -2.0, -0.5];
        let a = [1.0, -0.5, 2.0];
        let o = clipped_objective(&lp, &lp, &a, EPSILON).unwrap();
        assert!((o.value - 2.5 / 3.0).abs() < 1e-15);
        assert_eq!(o.clip_fraction, 0.0);
    }

    #[test]
    fn ratio_two_is_clipped() {
        let o = clipped_objective(&[0.0], &[2f64.ln()], &[3.0], EPSILON).unwrap();
        assert!((o.value - 1.2 * 3.0).abs() < 1e-12);
        assert!(o.terms[0].clipped);
        assert_eq!(term_gradients(&o, &[3.0]), vec![0.0]);
    }

    #[test]
    fn zero_advantage_zero_objective() {
        let o = clipped_objective(&[0.1, 0.2], &[0.5, -0.3], &[0.0, 0.0], EPSILON).unwrap();
        assert_eq!(o.value, 0.0);
        assert!(clipped_objective(&[0.0], &[f64::NAN], &[1.0], EPSILON).is_err());
    }

    proptest! {
        #[test]
        fn terms_bounded(old in -5.0f64..0.0, delta in -3.0f64..3.0, a in -4.0f64..4.0, eps in 0.01f64..0.5) {
            let o = clipped_objective(&[old], &[old + delta], &[a], eps).unwrap();
            let t = o.terms[0];
            // The pessimistic minimum is bounded above by (1+ε)|A| always, and
            // in magnitude whenever the advantage is non-negative or the ratio
            // stays below 1+ε; a negative advantage with a large ratio is not
            // clipped from below.
            prop_assert!(t.term <= (1.0 + eps) * a.abs() + 1e-12);
            if a >= 0.0 || t.ratio <= 1.0 + eps {
                prop_assert!(t.term.abs() <= (1.0 + eps) * a.abs() + 1e-12);
            }
            prop_assert!((0.0..=1.0).contains(&o.clip_fraction));
        }
    }
}
