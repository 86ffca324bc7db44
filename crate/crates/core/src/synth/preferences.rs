//! Persona-driven preference pairs: an instruction and the vector it implies.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env_sim::{PreferenceLine, Split};
use crate::error::SynthError;
use crate::rewards::{preference_vector, validate_vector};
use crate::seed::mix;
use crate::tool_registry::ToolCatalog;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persona {
    /// Keeps data on premises: only local tools.
    Privacy,
    Budget,
    Speed,
    Quality,
    /// Trusts one particular tool.
    Loyal,
    Balanced,
}

pub const PERSONAS: [Persona; 6] = [
    Persona::Privacy,
    Persona::Budget,
    Persona::Speed,
    Persona::Quality,
    Persona::Loyal,
    Persona::Balanced,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub pair_id: String,
    pub persona: Persona,
    pub instruction: String,
    pub vector: Vec<f64>,
    /// Tools the instruction asks for by name.
    pub preferred: Vec<String>,
    /// Tools the instruction asks to avoid by name.
    pub avoided: Vec<String>,
    pub split: Split,
    pub rationale: String,
}

impl PreferencePair {
    pub fn to_line(&self) -> PreferenceLine {
        PreferenceLine {
            pair_id: self.pair_id.clone(),
            instruction: self.instruction.clone(),
            vector: self.vector.clone(),
            split: self.split,
            rationale: self.rationale.clone(),
        }
    }
}

/// Tools that run on premises: names starting with `local_` or `open_`.
pub fn is_local_tool(name: &str) -> bool {
    name.starts_with("local_") || name.starts_with("open_")
}

fn join(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn build(persona: Persona, catalog: &ToolCatalog, rng: &mut ChaCha8Rng) -> Option<(String, Vec<f64>, Vec<String>, Vec<String>, String)> {
    let names = catalog.names();
    let n = names.len();
    let weights = |preferred: &[String]| -> Vec<(usize, f64)> {
        preferred.iter().filter_map(|t| catalog.index_of(t)).map(|i| (i, 1.0)).collect()
    };
    Some(match persona {
        Persona::Privacy => {
            let (local, remote): (Vec<String>, Vec<String>) = names.iter().cloned().partition(|t| is_local_tool(t));
            if local.is_empty() || remote.is_empty() {
                return None;
            }
            (
                format!(
                    "My data must not leave our servers. Use {} and avoid {}.",
                    join(&local),
                    join(&remote)
                ),
                preference_vector(n, &weights(&local), 0.0, 0.0, 0.0),
                local,
                remote,
                "only on-premise tools are acceptable".into(),
            )
        }
        Persona::Budget => (
            "I am on a tight budget. Get it right, but spend as little as possible.".into(),
            preference_vector(n, &[], 1.0, 1.0, 0.0),
            vec![],
            vec![],
            "correctness first, then cost".into(),
        ),
        Persona::Speed => (
            "I need this quickly. A correct answer fast matters more than anything else.".into(),
            preference_vector(n, &[], 1.0, 0.0, 1.0),
            vec![],
            vec![],
            "correctness first, then latency".into(),
        ),
        Persona::Quality => (
            "Accuracy is all I care about; cost and time do not matter.".into(),
            preference_vector(n, &[], 1.0, 0.0, 0.0),
            vec![],
            vec![],
            "correctness only".into(),
        ),
        Persona::Loyal => {
            let pick = names.choose(rng)?.clone();
            (
                format!("I trust {pick}. Please use it whenever you can."),
                preference_vector(n, &weights(std::slice::from_ref(&pick)), 1.0, 0.0, 0.0),
                vec![pick],
                vec![],
                "named tool plus correctness".into(),
            )
        }
        Persona::Balanced => (
            "Please balance accuracy, cost and speed sensibly.".into(),
            preference_vector(n, &[], 1.0, 0.5, 0.5),
            vec![],
            vec![],
            "correctness with equal weight on cost and latency".into(),
        ),
    })
}

/// Generates `count` pairs cycling through the personas that apply to
/// `catalog`. Every fourth cycle goes to the eval split.
pub fn generate_preference_pairs(catalog: &ToolCatalog, count: usize, seed: u64) -> Vec<PreferencePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 0x5052_4546));
    let personas: Vec<Persona> = PERSONAS
        .iter()
        .copied()
        .filter(|p| *p != Persona::Privacy || build(*p, catalog, &mut rng.clone()).is_some())
        .collect();
    (0..count)
        .filter_map(|i| {
            let persona = personas[i % personas.len()];
            let cycle = i / personas.len();
            let (instruction, vector, preferred, avoided, rationale) = build(persona, catalog, &mut rng)?;
            Some(PreferencePair {
                pair_id: format!("pref-{i:04}"),
                persona,
                instruction,
                vector,
                preferred,
                avoided,
                split: if cycle % 4 == 3 { Split::Eval } else { Split::Train },
                rationale,
            })
        })
        .collect()
}

/// Checks that the vector is well formed and agrees with the tools the
/// instruction names.
pub fn check_pair(pair: &PreferencePair, catalog: &ToolCatalog) -> Result<(), SynthError> {
    let bad = |m: String| SynthError::TemplateMismatch(format!("pair `{}`: {m}", pair.pair_id));
    validate_vector(&pair.vector, catalog.len()).map_err(|e| bad(e.to_string()))?;
    for (names, want) in [(&pair.preferred, 1.0), (&pair.avoided, 0.0)] {
        for name in names {
            let i = catalog.index_of(name).ok_or_else(|| bad(format!("unknown tool `{name}`")))?;
            if pair.vector[i] != want {
                return Err(bad(format!("`{name}` has weight {} but the instruction implies {want}", pair.vector[i])));
            }
            if !pair.instruction.contains(name.as_str()) {
                return Err(bad(format!("`{name}` is not mentioned in the instruction")));
            }
        }
    }
    Ok(())
}
