//! On-disk environment bundles.
//!
//! A bundle directory holds `schema.json`, `entries.jsonl`, `tools.json`,
//! `pricing.json`, `latency.json`, `tasks.jsonl` and optionally
//! `preferences.jsonl`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::db::{DomainDb, Record, TableSchema};
use super::task::TaskSpec;
use crate::error::EnvError;
use crate::rewards::PreferenceProfile;
use crate::tool_registry::{LatencyModel, PricingEntry, ToolCall, ToolCatalog, ToolSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryLine {
    pub table: String,
    pub key: String,
    pub fields: Record,
}

/// One line of `tasks.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskLine {
    pub task_id: String,
    pub domain: String,
    pub instruction: String,
    pub golden_calls: Vec<ToolCall>,
    pub required_info: String,
    #[serde(default)]
    pub preference_ref: Option<String>,
    /// Defaults to every tool in `tools.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub available_tools: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pricing: Option<BTreeMap<String, PricingEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complications: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Eval,
}

/// One line of `preferences.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceLine {
    pub pair_id: String,
    pub instruction: String,
    pub vector: Vec<f64>,
    pub split: Split,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rationale: String,
}

/// A loaded environment: database, catalog, tasks and preference pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvBundle {
    pub db: Arc<DomainDb>,
    pub catalog: ToolCatalog,
    pub tasks: Vec<TaskSpec>,
    pub preferences: Vec<PreferenceLine>,
}

fn bundle_err(path: &Path, e: impl std::fmt::Display) -> EnvError {
    EnvError::Bundle(format!("{}: {e}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, EnvError> {
    let text = fs::read_to_string(path).map_err(|e| bundle_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| bundle_err(path, e))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, EnvError> {
    let file = fs::File::open(path).map_err(|e| bundle_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| bundle_err(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

/// Writes values as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), EnvError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes one compact JSON value per line.
pub fn write_jsonl<T: Serialize>(path: &Path, values: &[T]) -> Result<(), EnvError> {
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    for v in values {
        serde_json::to_writer(&mut file, v)?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

impl PreferenceLine {
    pub fn profile(&self, catalog_ref: &str) -> PreferenceProfile {
        PreferenceProfile {
            instruction: self.instruction.clone(),
            vector: self.vector.clone(),
            catalog_ref: catalog_ref.to_string(),
            pair_id: Some(self.pair_id.clone()),
        }
    }
}

impl EnvBundle {
    /// Identifier binding preference vectors to this bundle's tool order.
    pub fn catalog_ref(&self) -> String {
        self.catalog.names().join(",")
    }

    /// Split of the preference pair a task was built from.
    pub fn split_of(&self, task: &TaskSpec) -> Option<Split> {
        let id = task.preference.as_ref()?.pair_id.as_deref()?;
        self.preferences.iter().find(|p| p.pair_id == id).map(|p| p.split)
    }

    pub fn load(dir: &Path) -> Result<Self, EnvError> {
        let schema: BTreeMap<String, TableSchema> = read_json(&dir.join("schema.json"))?;
        let mut db = DomainDb::new(schema);
        for entry in read_jsonl::<EntryLine>(&dir.join("entries.jsonl"))? {
            let key_field = db
                .schema
                .get(&entry.table)
                .map(|s| s.key_field.clone())
                .ok_or_else(|| EnvError::Bundle(format!("entry for unknown table `{}`", entry.table)))?;
            let mut fields = entry.fields;
            fields.insert(key_field, Value::String(entry.key.clone()));
            let stored = db.insert(&entry.table, fields)?;
            if stored != entry.key {
                return Err(EnvError::Bundle(format!("entry key `{}` does not match record", entry.key)));
            }
        }
        db.validate()?;
        let db = Arc::new(db);

        let tools: Vec<ToolSpec> = read_json(&dir.join("tools.json"))?;
        let pricing: BTreeMap<String, PricingEntry> = read_json(&dir.join("pricing.json"))?;
        let latency: BTreeMap<String, LatencyModel> = read_json(&dir.join("latency.json"))?;
        let catalog = ToolCatalog::from_parts(tools, pricing, latency)?;

        let pref_path = dir.join("preferences.jsonl");
        let preferences: Vec<PreferenceLine> = if pref_path.exists() {
            read_jsonl(&pref_path)?
        } else {
            Vec::new()
        };
        let catalog_ref = catalog.names().join(",");
        let by_id: BTreeMap<&str, &PreferenceLine> =
            preferences.iter().map(|p| (p.pair_id.as_str(), p)).collect();

        let mut tasks = Vec::new();
        for line in read_jsonl::<TaskLine>(&dir.join("tasks.jsonl"))? {
            let preference = match &line.preference_ref {
                None => None,
                Some(id) => Some(
                    by_id
                        .get(id.as_str())
                        .ok_or_else(|| EnvError::Bundle(format!("task `{}` names unknown preference `{id}`", line.task_id)))?
                        .profile(&catalog_ref),
                ),
            };
            let task = TaskSpec {
                available_tools: line.available_tools.unwrap_or_else(|| catalog.names()),
                task_id: line.task_id,
                domain: line.domain,
                instruction: line.instruction,
                golden_calls: line.golden_calls,
                required_info: line.required_info,
                initial_db: Arc::clone(&db),
                preference,
                gold_answer: line.gold_answer,
                pricing: line.pricing,
                intent: line.intent,
                complications: line.complications,
            };
            task.validate(&catalog)?;
            tasks.push(task);
        }
        Ok(Self {
            db,
            catalog,
            tasks,
            preferences,
        })
    }

    /// Writes the bundle. Task preferences are stored by reference to their pair
    /// id, or else to the pair whose instruction and vector they match.
    pub fn save(&self, dir: &Path) -> Result<(), EnvError> {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("schema.json"), &self.db.schema)?;
        let entries: Vec<EntryLine> = self
            .db
            .entries
            .iter()
            .flat_map(|(table, records)| {
                records.iter().map(move |(key, fields)| EntryLine {
                    table: table.clone(),
                    key: key.clone(),
                    fields: fields.clone(),
                })
            })
            .collect();
        write_jsonl(&dir.join("entries.jsonl"), &entries)?;
        write_json(&dir.join("tools.json"), self.catalog.tools())?;
        write_json(&dir.join("pricing.json"), self.catalog.pricing_table())?;
        write_json(&dir.join("latency.json"), self.catalog.latency_table())?;
        let all_tools = self.catalog.names();
        let mut lines = Vec::with_capacity(self.tasks.len());
        for t in &self.tasks {
            let preference_ref = match &t.preference {
                None => None,
                Some(p) => Some(
                    self.preferences
                        .iter()
                        .find(|l| match &p.pair_id {
                            Some(id) => &l.pair_id == id,
                            None => l.instruction == p.instruction && l.vector == p.vector,
                        })
                        .map(|l| l.pair_id.clone())
                        .ok_or_else(|| EnvError::Bundle(format!("task `{}` has an unlisted preference", t.task_id)))?,
                ),
            };
            lines.push(TaskLine {
                task_id: t.task_id.clone(),
                domain: t.domain.clone(),
                instruction: t.instruction.clone(),
                golden_calls: t.golden_calls.clone(),
                required_info: t.required_info.clone(),
                preference_ref,
                available_tools: (t.available_tools != all_tools).then(|| t.available_tools.clone()),
                gold_answer: t.gold_answer.clone(),
                pricing: t.pricing.clone(),
                intent: t.intent.clone(),
                complications: t.complications.clone(),
            });
        }
        write_jsonl(&dir.join("tasks.jsonl"), &lines)?;
        if !self.preferences.is_empty() {
            write_jsonl(&dir.join("preferences.jsonl"), &self.preferences)?;
        }
        Ok(())
    }
}
