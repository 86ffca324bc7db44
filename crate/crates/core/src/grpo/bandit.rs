//! Two-tool routing bandit: a cheap, less accurate model versus an expensive,
//! more accurate one, plus an exact expected-reward oracle.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::env_sim::{DomainDb, FieldDef, FieldType, TableSchema, TaskSpec};
use crate::rewards::PreferenceProfile;
use crate::tool_registry::{
    LatencyModel, ParamSpec, ParamType, PricingEntry, ScriptedTool, ToolBinding, ToolCatalog, ToolKind, ToolSpec,
    DESCRIPTION_HEADER,
};

pub const CHEAP: usize = 0;
pub const EXPENSIVE: usize = 1;

const WORDS: [&str; 12] = [
    "amber", "basil", "cedar", "dune", "ember", "fjord", "garnet", "harbor", "indigo", "juniper", "kestrel", "lagoon",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanditSpec {
    pub cheap_accuracy: f64,
    pub expensive_accuracy: f64,
    /// Dollars per call.
    pub cheap_price: f64,
    pub expensive_price: f64,
    /// Seconds per call.
    pub cheap_latency: f64,
    pub expensive_latency: f64,
    pub questions: usize,
}

impl BanditSpec {
    pub fn new(cheap_accuracy: f64) -> Self {
        Self {
            cheap_accuracy,
            expensive_accuracy: 1.0,
            cheap_price: 0.001,
            expensive_price: 0.01,
            cheap_latency: 0.5,
            expensive_latency: 2.0,
            questions: WORDS.len(),
        }
    }

    fn accuracy(&self, action: usize) -> f64 {
        if action == CHEAP {
            self.cheap_accuracy
        } else {
            self.expensive_accuracy
        }
    }

    fn price(&self, action: usize) -> f64 {
        if action == CHEAP {
            self.cheap_price
        } else {
            self.expensive_price
        }
    }

    fn latency(&self, action: usize) -> f64 {
        if action == CHEAP {
            self.cheap_latency
        } else {
            self.expensive_latency
        }
    }
}

fn model_tool(name: &str, accuracy: f64) -> ToolSpec {
    ToolSpec {
        name: name.into(),
        description: format!("{DESCRIPTION_HEADER} {name}\nAnswers short factual questions; accuracy {accuracy:.2}."),
        params: vec![ParamSpec::required("query", ParamType::String, "the question")],
        kind: ToolKind::ModelEndpoint,
        pricing_ref: name.into(),
        latency_ref: name.into(),
        binding: Some(ToolBinding::Scripted(ScriptedTool::Answerer {
            table: "questions".into(),
            query_field: "question".into(),
            answer_field: "answer".into(),
            accuracy,
            extra_output_tokens: 0,
        })),
    }
}

/// The bandit catalog (`cheap_model`, `expensive_model`) and one task per
/// question, each carrying `preference`.
pub fn bandit_env(spec: &BanditSpec, preference: &[f64]) -> (ToolCatalog, Vec<TaskSpec>) {
    let pricing = BTreeMap::from([
        ("cheap_model".to_string(), PricingEntry::flat(spec.cheap_price)),
        ("expensive_model".to_string(), PricingEntry::flat(spec.expensive_price)),
    ]);
    let latency = BTreeMap::from([
        ("cheap_model".to_string(), LatencyModel::constant(spec.cheap_latency)),
        ("expensive_model".to_string(), LatencyModel::constant(spec.expensive_latency)),
    ]);
    let catalog = ToolCatalog::from_parts(
        vec![
            model_tool("cheap_model", spec.cheap_accuracy),
            model_tool("expensive_model", spec.expensive_accuracy),
        ],
        pricing,
        latency,
    )
    .expect("bandit catalog is well formed");

    let schema = BTreeMap::from([(
        "questions".to_string(),
        TableSchema {
            key_field: "qid".into(),
            fields: BTreeMap::from([
                ("qid".to_string(), FieldDef::of(FieldType::String)),
                ("question".to_string(), FieldDef::of(FieldType::String)),
                ("answer".to_string(), FieldDef::of(FieldType::String)),
            ]),
        },
    )]);
    let mut db = DomainDb::new(schema);
    let n = spec.questions.clamp(2, WORDS.len());
    for (i, word) in WORDS.iter().take(n).enumerate() {
        let record = json!({
            "qid": format!("q{i:02}"),
            "question": format!("What is the code word of vault {i}?"),
            "answer": word,
        });
        db.insert("questions", record.as_object().cloned().unwrap_or_default())
            .expect("bandit record matches schema");
    }
    let db = Arc::new(db);
    let profile = PreferenceProfile::new("bandit preference", preference.to_vec(), catalog.names().join(","));
    let tasks = (0..n)
        .map(|i| TaskSpec {
            task_id: format!("bandit-{i:02}"),
            domain: "bandit".into(),
            instruction: format!("What is the code word of vault {i}?"),
            golden_calls: Vec::new(),
            required_info: String::new(),
            initial_db: Arc::clone(&db),
            available_tools: catalog.names(),
            preference: Some(profile.clone()),
            gold_answer: Some(WORDS[i].to_string()),
            pricing: None,
            intent: Some("lookup".into()),
            complications: Vec::new(),
        })
        .collect();
    (catalog, tasks)
}

/// Preference vector `[cheap, expensive, outcome, compute, latency]`.
pub fn bandit_preference(outcome: f64, compute: f64, latency: f64) -> Vec<f64> {
    vec![0.0, 0.0, outcome, compute, latency]
}

/// Exact expected reward of one rollout that picks `action`, when the other
/// `group_size - 1` rollouts of its group pick the cheap tool with probability
/// `q_cheap`. Enumerates every group composition and success pattern and
/// applies min-max normalization and the gated preference dot product
/// directly.
pub fn expected_reward(spec: &BanditSpec, preference: &[f64], group_size: usize, q_cheap: f64, action: usize) -> f64 {
    // Each other member is one of four (action, success) states.
    let states: Vec<(usize, bool, f64)> = [CHEAP, EXPENSIVE]
        .iter()
        .flat_map(|&a| {
            let p_a = if a == CHEAP { q_cheap } else { 1.0 - q_cheap };
            let acc = spec.accuracy(a);
            [(a, true, p_a * acc), (a, false, p_a * (1.0 - acc))]
        })
        .collect();
    let others = group_size - 1;
    let mut total = 0.0;
    for own_success in [true, false] {
        let p_own = if own_success { spec.accuracy(action) } else { 1.0 - spec.accuracy(action) };
        if p_own == 0.0 {
            continue;
        }
        let combos = 4usize.pow(others as u32);
        for code in 0..combos {
            let mut c = code;
            let mut prob = p_own;
            let mut members = vec![(action, own_success)];
            for _ in 0..others {
                let (a, s, p) = states[c % 4];
                c /= 4;
                prob *= p;
                members.push((a, s));
            }
            if prob == 0.0 {
                continue;
            }
            let vectors: Vec<[f64; 5]> = members
                .iter()
                .map(|&(a, s)| {
                    [
                        if a == CHEAP { 1.0 } else { 0.0 },
                        if a == EXPENSIVE { 1.0 } else { 0.0 },
                        if s { 1.0 } else { 0.0 },
                        -spec.price(a),
                        -spec.latency(a),
                    ]
                })
                .collect();
            let mut reward = 0.0;
            if own_success {
                for k in 0..5 {
                    let lo = vectors.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                    let hi = vectors.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
                    if hi > lo {
                        reward += preference[k] * (vectors[0][k] - lo) / (hi - lo);
                    }
                }
            }
            total += prob * reward;
        }
    }
    total
}

/// The action with the larger expected reward against a uniformly mixed group.
pub fn analytic_argmax(spec: &BanditSpec, preference: &[f64], group_size: usize) -> usize {
    let cheap = expected_reward(spec, preference, group_size, 0.5, CHEAP);
    let expensive = expected_reward(spec, preference, group_size, 0.5, EXPENSIVE);
    if cheap >= expensive {
        CHEAP
    } else {
        EXPENSIVE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_matches_intuition_in_both_regimes() {
        let cost_aware = bandit_preference(1.0, 1.0, 0.0);
        assert_eq!(analytic_argmax(&BanditSpec::new(0.95), &cost_aware, 8), CHEAP);
        let accuracy_only = bandit_preference(1.0, 0.0, 0.0);
        assert_eq!(analytic_argmax(&BanditSpec::new(0.6), &accuracy_only, 8), EXPENSIVE);
    }

    #[test]
    fn cheap_wins_for_every_mixture_when_cost_matters() {
        let spec = BanditSpec::new(0.95);
        let p = bandit_preference(1.0, 1.0, 0.0);
        for q in [0.05, 0.3, 0.7, 0.95] {
            assert!(expected_reward(&spec, &p, 4, q, CHEAP) > expected_reward(&spec, &p, 4, q, EXPENSIVE));
        }
    }
}
