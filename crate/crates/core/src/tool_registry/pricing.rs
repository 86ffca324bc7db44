use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ToolError;

/// Per-tool price schedule, in dollars. Token prices are per million tokens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PricingEntry {
    #[serde(default)]
    pub input_per_m: f64,
    #[serde(default)]
    pub output_per_m: f64,
    #[serde(default)]
    pub flat: f64,
}

impl PricingEntry {
    pub fn per_token(input_per_m: f64, output_per_m: f64) -> Self {
        Self {
            input_per_m,
            output_per_m,
            flat: 0.0,
        }
    }

    pub fn flat(per_call: f64) -> Self {
        Self {
            input_per_m: 0.0,
            output_per_m: 0.0,
            flat: per_call,
        }
    }

    pub fn free() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), ToolError> {
        let all = [self.input_per_m, self.output_per_m, self.flat];
        if all.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(ToolError::InvalidPricing(format!("negative or non-finite price in {self:?}")));
        }
        if self.flat > 0.0 && (self.input_per_m > 0.0 || self.output_per_m > 0.0) {
            return Err(ToolError::InvalidPricing(
                "token prices and a flat price cannot both be active".into(),
            ));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            input_per_m: self.input_per_m * factor,
            output_per_m: self.output_per_m * factor,
            flat: self.flat * factor,
        }
    }
}

/// Monetary cost of one call: `in·input_price/1e6 + out·output_price/1e6 + flat`.
pub fn price_call(pricing: &PricingEntry, tokens_in: u64, tokens_out: u64) -> f64 {
    tokens_in as f64 * pricing.input_per_m / 1e6
        + tokens_out as f64 * pricing.output_per_m / 1e6
        + pricing.flat
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Jitter {
    #[default]
    Deterministic,
    /// Multiplies the latency by a factor drawn uniformly from `[1-spread, 1+spread]`,
    /// seeded by the call.
    SeededRandom { spread: f64 },
}

/// Simulated latency in seconds: `base + per_output_token·tokens_out`, optionally jittered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub base: f64,
    #[serde(default)]
    pub per_output_token: f64,
    #[serde(default)]
    pub jitter: Jitter,
}

impl LatencyModel {
    pub fn constant(base: f64) -> Self {
        Self {
            base,
            per_output_token: 0.0,
            jitter: Jitter::Deterministic,
        }
    }

    pub fn validate(&self) -> Result<(), ToolError> {
        let spread_ok = match self.jitter {
            Jitter::Deterministic => true,
            Jitter::SeededRandom { spread } => (0.0..1.0).contains(&spread),
        };
        if self.base < 0.0 || self.per_output_token < 0.0 || !spread_ok {
            return Err(ToolError::InvalidPricing(format!("invalid latency model {self:?}")));
        }
        Ok(())
    }

    pub fn latency(&self, tokens_out: u64, call_seed: u64) -> f64 {
        let nominal = self.base + self.per_output_token * tokens_out as f64;
        match self.jitter {
            Jitter::Deterministic => nominal,
            Jitter::SeededRandom { spread } => {
                let mut rng = ChaCha8Rng::seed_from_u64(call_seed);
                nominal * rng.random_range(1.0 - spread..=1.0 + spread)
            }
        }
    }
}

/// Approximate token counting for simulated tools: whitespace-delimited pieces
/// times a fixed factor, rounded up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenCounter {
    pub tokens_per_piece: f64,
}

impl Default for TokenCounter {
    fn default() -> Self {
        Self {
            tokens_per_piece: 1.3,
        }
    }
}

impl TokenCounter {
    pub fn count(&self, text: &str) -> u64 {
        let pieces = text.split_whitespace().count();
        (pieces as f64 * self.tokens_per_piece).ceil() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn token_priced_call() {
        let p = PricingEntry::per_token(2.0, 8.0);
        assert!((price_call(&p, 1000, 500) - 0.006).abs() < 1e-15);
    }

    #[test]
    fn flat_priced_call_ignores_tokens() {
        let p = PricingEntry::flat(0.01);
        assert_eq!(price_call(&p, 0, 0), 0.01);
        assert_eq!(price_call(&p, 123_456, 7), 0.01);
    }

    #[test]
    fn doubling_prices_doubles_cost() {
        let p = PricingEntry::per_token(2.0, 8.0);
        assert_eq!(price_call(&p.scaled(2.0), 1000, 500), 2.0 * price_call(&p, 1000, 500));
    }

    #[test]
    fn mixed_modes_rejected() {
        let p = PricingEntry {
            input_per_m: 1.0,
            output_per_m: 0.0,
            flat: 0.5,
        };
        assert!(p.validate().is_err());
        assert!(PricingEntry::flat(-1.0).validate().is_err());
    }

    #[test]
    fn token_counter_rounds_up() {
        let c = TokenCounter::default();
        assert_eq!(c.count(""), 0);
        assert_eq!(c.count("one"), 2);
        assert_eq!(c.count("a b c d e f g h i j"), 13);
    }

    #[test]
    fn jitter_is_seeded() {
        let m = LatencyModel {
            base: 1.0,
            per_output_token: 0.01,
            jitter: Jitter::SeededRandom { spread: 0.2 },
        };
        assert_eq!(m.latency(10, 5), m.latency(10, 5));
        let l = m.latency(10, 5);
        assert!((0.88..=1.32).contains(&l));
        assert_eq!(LatencyModel::constant(0.5).latency(99, 1), 0.5);
    }

    proptest! {
        #[test]
        fn cost_is_linear_in_prices(
            input in 0.0f64..100.0, output in 0.0f64..100.0,
            tin in 0u64..100_000, tout in 0u64..100_000, lambda in 0.01f64..100.0,
        ) {
            let p = PricingEntry::per_token(input, output);
            let base = price_call(&p, tin, tout);
            let scaled = price_call(&p.scaled(lambda), tin, tout);
            prop_assert!((scaled - lambda * base).abs() <= 1e-12 * scaled.abs().max(1.0));
        }
    }
}
