//! A question-answering environment where the choice is which search tool or
//! model to route each question to. Every task pairs a question with a
//! synthesized preference.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::preferences::{generate_preference_pairs, PreferencePair};
use crate::env_sim::{DomainDb, EnvBundle, FieldDef, FieldType, TableSchema, TaskSpec};
use crate::rewards::PreferenceProfile;
use crate::seed::mix;
use crate::tool_registry::{
    LatencyModel, ParamSpec, ParamType, PricingEntry, ScriptedTool, ToolBinding, ToolCatalog, ToolKind, ToolSpec,
    DESCRIPTION_HEADER,
};

/// One routable tool and its simulated quality, price and speed.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteOption {
    pub name: &'static str,
    pub kind: ToolKind,
    pub accuracy: f64,
    pub pricing: PricingEntry,
    pub latency: LatencyModel,
    /// Hidden generation billed per call.
    pub extra_output_tokens: u64,
    pub summary: &'static str,
}

fn lat(base: f64, per_output_token: f64) -> LatencyModel {
    LatencyModel {
        per_output_token,
        ..LatencyModel::constant(base)
    }
}

pub fn route_options() -> Vec<RouteOption> {
    vec![
        RouteOption {
            name: "web_search",
            kind: ToolKind::Search,
            accuracy: 0.6,
            pricing: PricingEntry::flat(0.01),
            latency: lat(1.2, 0.0),
            extra_output_tokens: 0,
            summary: "Hosted web search; returns a snippet.",
        },
        RouteOption {
            name: "local_search",
            kind: ToolKind::Search,
            accuracy: 0.45,
            pricing: PricingEntry::free(),
            latency: lat(0.2, 0.0),
            extra_output_tokens: 0,
            summary: "Search over an on-premise index.",
        },
        RouteOption {
            name: "open_model_large",
            kind: ToolKind::ModelEndpoint,
            accuracy: 0.8,
            pricing: PricingEntry::per_token(0.9, 0.9),
            latency: lat(1.5, 0.002),
            extra_output_tokens: 3000,
            summary: "Large open-weight model served on premises.",
        },
        RouteOption {
            name: "open_model_medium",
            kind: ToolKind::ModelEndpoint,
            accuracy: 0.65,
            pricing: PricingEntry::per_token(0.6, 0.6),
            latency: lat(0.5, 0.001),
            extra_output_tokens: 800,
            summary: "Medium open-weight model served on premises.",
        },
        RouteOption {
            name: "api_model_mini",
            kind: ToolKind::ModelEndpoint,
            accuracy: 0.85,
            pricing: PricingEntry::per_token(1.1, 4.4),
            latency: lat(1.0, 0.003),
            extra_output_tokens: 2000,
            summary: "Small hosted reasoning model.",
        },
        RouteOption {
            name: "api_model_large",
            kind: ToolKind::ModelEndpoint,
            accuracy: 0.95,
            pricing: PricingEntry::per_token(2.0, 8.0),
            latency: lat(2.0, 0.004),
            extra_output_tokens: 5000,
            summary: "Large hosted reasoning model.",
        },
    ]
}

pub fn routing_catalog() -> ToolCatalog {
    let options = route_options();
    let tools = options
        .iter()
        .map(|o| {
            let description = match o.kind {
                ToolKind::ModelEndpoint => format!("{DESCRIPTION_HEADER} {}\n{}", o.name, o.summary),
                _ => o.summary.to_string(),
            };
            ToolSpec {
                name: o.name.into(),
                description,
                params: vec![ParamSpec::required("query", ParamType::String, "the question")],
                kind: o.kind,
                pricing_ref: o.name.into(),
                latency_ref: o.name.into(),
                binding: Some(ToolBinding::Scripted(ScriptedTool::Answerer {
                    table: "facts".into(),
                    query_field: "question".into(),
                    answer_field: "answer".into(),
                    accuracy: o.accuracy,
                    extra_output_tokens: o.extra_output_tokens,
                })),
            }
        })
        .collect();
    let pricing = options.iter().map(|o| (o.name.to_string(), o.pricing)).collect();
    let latency = options.iter().map(|o| (o.name.to_string(), o.latency)).collect();
    ToolCatalog::from_parts(tools, pricing, latency).expect("routing catalog is well formed")
}

const SUBJECTS: [&str; 8] = ["lighthouse", "observatory", "archive", "reservoir", "foundry", "monastery", "canal", "orchard"];
const ANSWERS: [&str; 16] = [
    "amber", "basil", "cobalt", "delta", "ember", "falcon", "garnet", "harbor", "iris", "jasper", "kelp", "linden",
    "marble", "nectar", "onyx", "pepper",
];

fn facts_db(questions: usize, rng: &mut ChaCha8Rng) -> (DomainDb, Vec<(String, String)>) {
    let schema = BTreeMap::from([(
        "facts".to_string(),
        TableSchema {
            key_field: "fact_id".into(),
            fields: BTreeMap::from([
                ("fact_id".to_string(), FieldDef::of(FieldType::String)),
                ("question".to_string(), FieldDef::of(FieldType::String)),
                ("answer".to_string(), FieldDef::of(FieldType::String)),
            ]),
        },
    )]);
    let mut db = DomainDb::new(schema);
    let mut qa = Vec::with_capacity(questions);
    for i in 0..questions {
        let subject = SUBJECTS[i % SUBJECTS.len()];
        let question = format!("What is the registry word of {subject} number {}?", i + 1);
        let answer = format!("{}-{}", ANSWERS[rng.random_range(0..ANSWERS.len())], rng.random_range(10..100));
        let record = json!({"fact_id": format!("Q{:03}", i + 1), "question": question, "answer": answer});
        db.insert("facts", record.as_object().cloned().unwrap_or_default())
            .expect("fact matches schema");
        qa.push((question, answer));
    }
    (db, qa)
}

/// Builds the routing bundle: `questions` facts and one task per
/// (question, preference pair). Task order is shuffled with `seed`.
pub fn routing_bundle(questions: usize, pairs: usize, seed: u64) -> EnvBundle {
    let catalog = routing_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 0x524f_5554));
    let (db, qa) = facts_db(questions.max(2), &mut rng);
    let db = Arc::new(db);
    let pairs: Vec<PreferencePair> = generate_preference_pairs(&catalog, pairs, seed);
    let catalog_ref = catalog.names().join(",");
    let mut tasks = Vec::with_capacity(qa.len() * pairs.len());
    for (qi, (question, answer)) in qa.iter().enumerate() {
        for pair in &pairs {
            let profile = PreferenceProfile::new(pair.instruction.clone(), pair.vector.clone(), catalog_ref.clone())
                .with_pair_id(pair.pair_id.clone());
            tasks.push(TaskSpec {
                task_id: format!("routing-q{:03}-{}", qi + 1, pair.pair_id),
                domain: "routing".into(),
                instruction: question.clone(),
                golden_calls: Vec::new(),
                required_info: String::new(),
                initial_db: Arc::clone(&db),
                available_tools: catalog.names(),
                preference: Some(profile),
                gold_answer: Some(answer.clone()),
                pricing: None,
                intent: Some(format!("{:?}", pair.persona).to_lowercase()),
                complications: Vec::new(),
            });
        }
    }
    tasks.shuffle(&mut rng);
    EnvBundle {
        db,
        catalog,
        tasks,
        preferences: pairs.iter().map(PreferencePair::to_line).collect(),
    }
}
