use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::env_sim::{DomainDb, FieldDef, FieldType, TableSchema, TaskSpec};
use crate::error::SynthError;
use crate::seed::{hash_seed, mix};
use crate::tool_registry::{LatencyModel, PricingEntry, ToolCall, ToolCatalog, ToolSpec};

const FIRST_NAMES: [&str; 16] = [
    "Ava", "Ben", "Chloe", "Diego", "Elena", "Farid", "Grace", "Hiro", "Isla", "Jonas", "Kemi", "Liam", "Maya", "Noor",
    "Omar", "Priya",
];
const LAST_NAMES: [&str; 16] = [
    "Adams", "Brooks", "Chen", "Dubois", "Evans", "Fischer", "Garcia", "Hughes", "Ito", "Jensen", "Khan", "Lopez",
    "Moreau", "Nakamura", "Okafor", "Petrov",
];

/// How the values of one field are generated.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldGen {
    /// `First Last` from fixed name pools.
    Person,
    /// One of the listed strings (stored as free text).
    Pool(&'static [&'static str]),
    /// One of the listed values (stored as an enumeration).
    Enum(&'static [&'static str]),
    /// Integer in `[lo, hi]`.
    Int(i64, i64),
    /// Amount with two decimals in `[lo, hi]`.
    Money(f64, f64),
    Bool(f64),
    /// `2025-MM-DD`.
    Date,
    /// Key of a record of an earlier table.
    Ref(&'static str),
    /// Up to `n` distinct keys of an earlier table.
    RefList(&'static str, usize),
}

impl FieldGen {
    fn def(&self) -> FieldDef {
        match self {
            FieldGen::Person | FieldGen::Pool(_) | FieldGen::Date => FieldDef::of(FieldType::String),
            FieldGen::Enum(values) => FieldDef::enumeration(values),
            FieldGen::Int(..) => FieldDef::of(FieldType::Integer),
            FieldGen::Money(..) => FieldDef::of(FieldType::Number),
            FieldGen::Bool(_) => FieldDef::of(FieldType::Boolean),
            FieldGen::Ref(t) => FieldDef::reference(t),
            FieldGen::RefList(t, _) => FieldDef::reference_list(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableTemplate {
    pub name: &'static str,
    pub key_field: &'static str,
    pub id_prefix: &'static str,
    pub fields: Vec<(&'static str, FieldGen)>,
    pub default_size: usize,
}

/// How an intent variable is bound when a task is instantiated.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    /// A random existing key of `table`, optionally restricted to records whose
    /// `field` equals one of the listed values.
    Key {
        table: &'static str,
        filter: Option<(&'static str, &'static [&'static str])>,
    },
    /// A field of the record named by an earlier key variable.
    Field {
        of: &'static str,
        table: &'static str,
        field: &'static str,
    },
    /// An existing key of `table` different from the one bound to `other`.
    OtherKey {
        table: &'static str,
        other: &'static str,
        filter: Option<(&'static str, &'static [&'static str])>,
    },
    /// A key not present in `table`.
    FreshKey { table: &'static str },
    /// One of the listed literal strings.
    Choice(&'static [&'static str]),
    /// Integer amount in `[lo, hi]`.
    Amount(i64, i64),
    /// Integer amount between 1 and the floor of a numeric field (at least 1).
    AmountUpTo {
        of: &'static str,
        table: &'static str,
        field: &'static str,
    },
    /// A field value read from the database after the golden calls ran.
    After {
        of: &'static str,
        table: &'static str,
        field: &'static str,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Var(&'static str),
    Lit(Value),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CallTemplate {
    pub tool: &'static str,
    pub args: Vec<(&'static str, Arg)>,
}

/// Extra constraint or step layered onto an instantiated task. Bindings may
/// refer to the arguments of the task's existing golden calls by parameter name.
#[derive(Clone, Debug, PartialEq)]
pub struct Complication {
    pub id: &'static str,
    pub bindings: Vec<(&'static str, Binding)>,
    pub instruction: &'static str,
    pub calls: Vec<CallTemplate>,
    pub required_info: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntentTemplate {
    pub id: &'static str,
    pub bindings: Vec<(&'static str, Binding)>,
    /// `{name}` placeholders are replaced by bound values.
    pub instruction: &'static str,
    pub calls: Vec<CallTemplate>,
    pub required_info: &'static str,
    pub complications: Vec<Complication>,
}

#[derive(Clone, Debug)]
pub struct DomainTemplate {
    pub domain: &'static str,
    pub tables: Vec<TableTemplate>,
    pub tools: Vec<ToolSpec>,
    pub pricing: BTreeMap<String, PricingEntry>,
    pub latency: BTreeMap<String, LatencyModel>,
    pub intents: Vec<IntentTemplate>,
}

impl DomainTemplate {
    pub fn default_sizes(&self) -> BTreeMap<String, usize> {
        self.tables.iter().map(|t| (t.name.to_string(), t.default_size)).collect()
    }

    fn table(&self, name: &str) -> Option<&TableTemplate> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Checks that every reference, tool and placeholder resolves.
    pub fn check(&self) -> Result<(), SynthError> {
        let unresolved = |kind: &'static str, name: &str| SynthError::UnresolvableReference {
            kind,
            name: name.to_string(),
        };
        for (i, t) in self.tables.iter().enumerate() {
            for (_, gen) in &t.fields {
                if let FieldGen::Ref(target) | FieldGen::RefList(target, _) = gen {
                    if !self.tables[..i].iter().any(|e| e.name == *target) {
                        return Err(unresolved("table", target));
                    }
                }
            }
        }
        let tool_names: Vec<&str> = self.tools.iter().map(|t| t.name.as_str()).collect();
        for intent in &self.intents {
            let mut vars: Vec<&str> = Vec::new();
            let check_bindings = |bindings: &[(&'static str, Binding)], vars: &mut Vec<&'static str>| {
                for (name, b) in bindings {
                    let (table, field) = match b {
                        Binding::Key { table, filter } | Binding::OtherKey { table, filter, .. } => {
                            (Some(*table), filter.map(|f| f.0))
                        }
                        Binding::Field { table, field, .. }
                        | Binding::AmountUpTo { table, field, .. }
                        | Binding::After { table, field, .. } => (Some(*table), Some(*field)),
                        Binding::FreshKey { table } => (Some(*table), None),
                        Binding::Choice(_) | Binding::Amount(..) => (None, None),
                    };
                    if let Some(table) = table {
                        let t = self.table(table).ok_or_else(|| unresolved("table", table))?;
                        if let Some(f) = field {
                            if f != t.key_field && !t.fields.iter().any(|(n, _)| *n == f) {
                                return Err(unresolved("field", &format!("{table}.{f}")));
                            }
                        }
                    }
                    vars.push(name);
                }
                Ok(())
            };
            check_bindings(&intent.bindings, &mut vars)?;
            for call in &intent.calls {
                if !tool_names.contains(&call.tool) {
                    return Err(unresolved("tool", call.tool));
                }
            }
            for text in [intent.instruction, intent.required_info] {
                for p in placeholders(text) {
                    if !vars.contains(&p.as_str()) {
                        return Err(unresolved("placeholder", &p));
                    }
                }
            }
            for c in &intent.complications {
                for call in &c.calls {
                    if !tool_names.contains(&call.tool) {
                        return Err(unresolved("tool", call.tool));
                    }
                }
                let mut local = Vec::new();
                check_bindings(&c.bindings, &mut local)?;
            }
        }
        Ok(())
    }
}

fn placeholders(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find('{') {
        match rest[start..].find('}') {
            Some(end) => {
                out.push(rest[start + 1..start + end].to_string());
                rest = &rest[start + end + 1..];
            }
            None => break,
        }
    }
    out
}

/// Text form of a bound value: strings verbatim, integral numbers without
/// decimals, other numbers with two.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if f.fract() == 0.0 && f.abs() < 1e15 => format!("{}", f as i64),
            Some(f) => format!("{f:.2}"),
            None => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn fill(text: &str, vars: &BTreeMap<String, Value>) -> String {
    let mut out = text.to_string();
    for (k, v) in vars {
        out = out.replace(&format!("{{{k}}}"), &render_value(v));
    }
    out
}

fn key_for(prefix: &str, i: usize) -> String {
    format!("{prefix}{:04}", i + 1)
}

fn money(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Value {
    let cents = rng.random_range((lo * 100.0).round() as i64..=(hi * 100.0).round() as i64);
    Value::from(cents as f64 / 100.0)
}

/// Builds the database and catalog of `template`. `sizes` overrides table sizes.
pub fn generate_environment(
    template: &DomainTemplate,
    sizes: &BTreeMap<String, usize>,
    seed: u64,
) -> Result<(DomainDb, ToolCatalog), SynthError> {
    template.check()?;
    let mut schema = BTreeMap::new();
    for t in &template.tables {
        let mut fields: BTreeMap<String, FieldDef> =
            t.fields.iter().map(|(n, g)| (n.to_string(), g.def())).collect();
        fields.insert(t.key_field.to_string(), FieldDef::of(FieldType::String));
        schema.insert(
            t.name.to_string(),
            TableSchema {
                key_field: t.key_field.to_string(),
                fields,
            },
        );
    }
    let mut db = DomainDb::new(schema);
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, hash_seed(0, template.domain.as_bytes())));
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &template.tables {
        let size = sizes.get(t.name).copied().unwrap_or(t.default_size);
        if size == 0 {
            return Err(SynthError::InvalidSize(t.name.to_string()));
        }
        counts.insert(t.name, size);
        for i in 0..size {
            let mut record = Map::new();
            record.insert(t.key_field.to_string(), Value::String(key_for(t.id_prefix, i)));
            for (name, gen) in &t.fields {
                let value = match gen {
                    FieldGen::Person => Value::String(format!(
                        "{} {}",
                        FIRST_NAMES.choose(&mut rng).expect("pool"),
                        LAST_NAMES.choose(&mut rng).expect("pool")
                    )),
                    FieldGen::Pool(values) | FieldGen::Enum(values) => {
                        Value::String(values.choose(&mut rng).expect("non-empty pool").to_string())
                    }
                    FieldGen::Int(lo, hi) => Value::from(rng.random_range(*lo..=*hi)),
                    FieldGen::Money(lo, hi) => money(&mut rng, *lo, *hi),
                    FieldGen::Bool(p) => Value::Bool(rng.random_bool(*p)),
                    FieldGen::Date => Value::String(format!(
                        "2025-{:02}-{:02}",
                        rng.random_range(1..=12),
                        rng.random_range(1..=28)
                    )),
                    FieldGen::Ref(target) | FieldGen::RefList(target, _) => {
                        let target_t = template
                            .table(target)
                            .ok_or_else(|| SynthError::UnresolvableReference {
                                kind: "table",
                                name: target.to_string(),
                            })?;
                        let n = counts[target];
                        match gen {
                            FieldGen::Ref(_) => Value::String(key_for(target_t.id_prefix, rng.random_range(0..n))),
                            _ => {
                                let FieldGen::RefList(_, max) = gen else { unreachable!() };
                                let k = rng.random_range(1..=(*max).min(n));
                                let picks = rand::seq::index::sample(&mut rng, n, k).into_vec();
                                let mut keys: Vec<String> = picks.into_iter().map(|j| key_for(target_t.id_prefix, j)).collect();
                                keys.sort();
                                Value::Array(keys.into_iter().map(Value::String).collect())
                            }
                        }
                    }
                };
                record.insert(name.to_string(), value);
            }
            db.insert(t.name, record)?;
        }
    }
    db.validate()?;
    let catalog = ToolCatalog::from_parts(template.tools.clone(), template.pricing.clone(), template.latency.clone())?;
    Ok((db, catalog))
}

fn pick_key(
    db: &DomainDb,
    rng: &mut ChaCha8Rng,
    table: &str,
    filter: Option<(&str, &[&str])>,
    exclude: Option<&Value>,
) -> Option<Value> {
    let records = db.table(table)?;
    let candidates: Vec<&String> = records
        .iter()
        .filter(|(k, r)| {
            filter.is_none_or(|(field, allowed)| {
                r.get(field)
                    .and_then(Value::as_str)
                    .is_some_and(|v| allowed.contains(&v))
            }) && exclude.and_then(Value::as_str) != Some(k.as_str())
        })
        .map(|(k, _)| k)
        .collect();
    candidates.choose(rng).map(|k| Value::String((*k).clone()))
}

fn bind(
    bindings: &[(&'static str, Binding)],
    vars: &mut BTreeMap<String, Value>,
    db: &DomainDb,
    template: &DomainTemplate,
    rng: &mut ChaCha8Rng,
) -> Option<()> {
    let record_field = |vars: &BTreeMap<String, Value>, of: &str, table: &str, field: &str| -> Option<Value> {
        let key = vars.get(of)?.as_str()?;
        db.get(table, key)?.get(field).cloned()
    };
    for (name, b) in bindings {
        let value = match b {
            Binding::Key { table, filter } => pick_key(db, rng, table, *filter, None)?,
            Binding::OtherKey { table, other, filter } => pick_key(db, rng, table, *filter, vars.get(*other))?,
            Binding::Field { of, table, field } => record_field(vars, of, table, field)?,
            Binding::FreshKey { table } => {
                let prefix = template.table(table)?.id_prefix;
                let n = db.table(table).map_or(0, |t| t.len());
                let mut i = n + rng.random_range(0..1000);
                while db.get(table, &key_for(prefix, i)).is_some() {
                    i += 1;
                }
                Value::String(key_for(prefix, i))
            }
            Binding::Choice(values) => Value::String(values.choose(rng)?.to_string()),
            Binding::Amount(lo, hi) => Value::from(rng.random_range(*lo..=*hi)),
            Binding::AmountUpTo { of, table, field } => {
                let cap = record_field(vars, of, table, field)?.as_f64()?.floor() as i64;
                Value::from(rng.random_range(1..=cap.max(1)))
            }
            // Resolved after the golden replay.
            Binding::After { .. } => continue,
        };
        vars.insert(name.to_string(), value);
    }
    Some(())
}

fn resolve_after(bindings: &[(&'static str, Binding)], vars: &mut BTreeMap<String, Value>, db: &DomainDb) {
    for (name, b) in bindings {
        if let Binding::After { of, table, field } = b {
            let value = vars
                .get(*of)
                .and_then(Value::as_str)
                .and_then(|k| db.get(table, k))
                .and_then(|r| r.get(*field))
                .cloned()
                .unwrap_or(Value::Null);
            vars.insert(name.to_string(), value);
        }
    }
}

fn build_calls(calls: &[CallTemplate], vars: &BTreeMap<String, Value>) -> Option<Vec<ToolCall>> {
    calls
        .iter()
        .map(|c| {
            let mut args = Map::new();
            for (param, arg) in &c.args {
                let v = match arg {
                    Arg::Var(name) => vars.get(*name)?.clone(),
                    Arg::Lit(v) => v.clone(),
                };
                args.insert(param.to_string(), v);
            }
            Some(ToolCall::new(c.tool, Value::Object(args)))
        })
        .collect()
}

/// Applies `calls` to a copy of `db`, ignoring failures; used only to resolve
/// post-replay placeholders.
fn replay_db(db: &DomainDb, catalog: &ToolCatalog, calls: &[ToolCall]) -> DomainDb {
    let mut state = crate::env_sim::EpisodeState::new("synth", db.clone());
    for call in calls {
        let _ = state.apply_call(catalog, call, 0);
    }
    state.db
}

/// Instantiates `count` tasks. Intents are assigned round-robin from a seeded
/// offset, so any window of consecutive tasks covers as many intents as it can.
pub fn generate_tasks(
    db: &Arc<DomainDb>,
    catalog: &ToolCatalog,
    template: &DomainTemplate,
    count: usize,
    seed: u64,
) -> Result<Vec<TaskSpec>, SynthError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    template.check()?;
    if template.intents.is_empty() {
        return Err(SynthError::TemplateMismatch(format!("domain `{}` has no intents", template.domain)));
    }
    for t in &template.tables {
        if !db.schema.contains_key(t.name) {
            return Err(SynthError::TemplateMismatch(format!("database lacks table `{}`", t.name)));
        }
    }
    for tool in &template.tools {
        if catalog.get(&tool.name).is_none() {
            return Err(SynthError::TemplateMismatch(format!("catalog lacks tool `{}`", tool.name)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, hash_seed(1, template.domain.as_bytes())));
    let offset = rng.random_range(0..template.intents.len());
    let tag = format!("{:08x}", hash_seed(seed, template.domain.as_bytes()) as u32);
    let mut tasks = Vec::with_capacity(count);
    for i in 0..count {
        let mut made = None;
        for attempt in 0..template.intents.len() {
            let intent = &template.intents[(offset + i + attempt) % template.intents.len()];
            let mut vars = BTreeMap::new();
            if bind(&intent.bindings, &mut vars, db, template, &mut rng).is_none() {
                continue;
            }
            let Some(calls) = build_calls(&intent.calls, &vars) else { continue };
            let after = replay_db(db, catalog, &calls);
            resolve_after(&intent.bindings, &mut vars, &after);
            made = Some(TaskSpec {
                task_id: format!("{}-{tag}-{i:04}", template.domain),
                domain: template.domain.to_string(),
                instruction: fill(intent.instruction, &vars),
                golden_calls: calls,
                required_info: fill(intent.required_info, &vars),
                initial_db: Arc::clone(db),
                available_tools: catalog.names(),
                preference: None,
                gold_answer: None,
                pricing: None,
                intent: Some(intent.id.to_string()),
                complications: Vec::new(),
            });
            break;
        }
        tasks.push(made.ok_or_else(|| {
            SynthError::TemplateMismatch(format!("no intent of `{}` can be instantiated", template.domain))
        })?);
    }
    Ok(tasks)
}

/// Result of [`complicate_task`].
#[derive(Clone, Debug, PartialEq)]
pub enum Complicated {
    Applied { task: TaskSpec, complication: String },
    /// No complication was applicable; the task is returned unchanged.
    Unchanged(TaskSpec),
}

impl Complicated {
    pub fn task(&self) -> &TaskSpec {
        match self {
            Complicated::Applied { task, .. } | Complicated::Unchanged(task) => task,
        }
    }

    pub fn into_task(self) -> TaskSpec {
        match self {
            Complicated::Applied { task, .. } | Complicated::Unchanged(task) => task,
        }
    }
}

/// Adds the first applicable, not yet applied complication of the task's
/// intent: extra golden calls appended after the existing ones, extra
/// instruction text and extra required information.
pub fn complicate_task(
    task: &TaskSpec,
    catalog: &ToolCatalog,
    template: &DomainTemplate,
    seed: u64,
) -> Result<Complicated, SynthError> {
    let Some(intent) = task
        .intent
        .as_deref()
        .and_then(|id| template.intents.iter().find(|i| i.id == id))
    else {
        return Ok(Complicated::Unchanged(task.clone()));
    };
    let db = &task.initial_db;
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, hash_seed(2, task.task_id.as_bytes())));
    for c in &intent.complications {
        if task.complications.iter().any(|applied| applied == c.id) {
            continue;
        }
        let mut vars: BTreeMap<String, Value> = BTreeMap::new();
        for call in &task.golden_calls {
            for (k, v) in &call.arguments {
                vars.insert(k.clone(), v.clone());
            }
        }
        if bind(&c.bindings, &mut vars, db, template, &mut rng).is_none() {
            continue;
        }
        let Some(extra) = build_calls(&c.calls, &vars) else { continue };
        let mut golden = task.golden_calls.clone();
        golden.extend(extra);
        let after = replay_db(db, catalog, &golden);
        resolve_after(&c.bindings, &mut vars, &after);
        let mut out = task.clone();
        out.golden_calls = golden;
        out.instruction = format!("{} {}", task.instruction, fill(c.instruction, &vars));
        let extra_info = fill(c.required_info, &vars);
        if !extra_info.is_empty() {
            out.required_info = if task.required_info.is_empty() {
                extra_info
            } else {
                format!("{}; {extra_info}", task.required_info)
            };
        }
        out.complications.push(c.id.to_string());
        let candidate = Complicated::Applied {
            task: out,
            complication: c.id.to_string(),
        };
        if candidate.task().replay_golden(&candidate.task().instance_catalog(catalog)?).is_ok() {
            return Ok(candidate);
        }
    }
    Ok(Complicated::Unchanged(task.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::domains::{all_domain_templates, domain_template};

    fn travel_env(seed: u64) -> (DomainTemplate, Arc<DomainDb>, ToolCatalog) {
        let t = domain_template("travel").unwrap();
        let (db, catalog) = generate_environment(&t, &BTreeMap::new(), seed).unwrap();
        (t, Arc::new(db), catalog)
    }

    #[test]
    fn generated_databases_are_valid_and_sized() {
        for t in all_domain_templates() {
            let (db, catalog) = generate_environment(&t, &BTreeMap::new(), 2).unwrap();
            db.validate().unwrap();
            assert_eq!(db.entry_count(), t.default_sizes().values().sum::<usize>());
            assert_eq!(catalog.len(), t.tools.len());
        }
    }

    #[test]
    fn same_seed_same_environment() {
        let (_, a, _) = travel_env(7);
        let (_, b, _) = travel_env(7);
        let (_, c, _) = travel_env(8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_size_is_rejected() {
        let t = domain_template("travel").unwrap();
        let sizes = BTreeMap::from([("users".to_string(), 0)]);
        assert!(matches!(generate_environment(&t, &sizes, 0), Err(SynthError::InvalidSize(_))));
    }

    #[test]
    fn dangling_table_reference_is_rejected() {
        let mut t = domain_template("travel").unwrap();
        t.tables[0].fields.push(("home", FieldGen::Ref("nowhere")));
        assert!(matches!(
            generate_environment(&t, &BTreeMap::new(), 0),
            Err(SynthError::UnresolvableReference { kind: "table", .. })
        ));
    }

    #[test]
    fn every_window_of_ten_has_two_intents() {
        let (t, db, catalog) = travel_env(1);
        let tasks = generate_tasks(&db, &catalog, &t, 60, 3).unwrap();
        for w in tasks.windows(10) {
            let mut intents: Vec<_> = w.iter().map(|t| t.intent.clone()).collect();
            intents.sort();
            intents.dedup();
            assert!(intents.len() >= 2);
        }
    }

    #[test]
    fn different_seeds_give_disjoint_tasks() {
        let (t, db, catalog) = travel_env(1);
        let a = generate_tasks(&db, &catalog, &t, 20, 1).unwrap();
        let b = generate_tasks(&db, &catalog, &t, 20, 2).unwrap();
        for x in &a {
            assert!(b.iter().all(|y| y.task_id != x.task_id));
        }
        assert_ne!(
            a.iter().map(|t| &t.golden_calls).collect::<Vec<_>>(),
            b.iter().map(|t| &t.golden_calls).collect::<Vec<_>>()
        );
    }

    #[test]
    fn template_catalog_mismatch_is_reported() {
        let (t, db, _) = travel_env(1);
        let other = domain_template("finance").unwrap();
        let (_, finance_catalog) = generate_environment(&other, &BTreeMap::new(), 1).unwrap();
        assert!(matches!(
            generate_tasks(&db, &finance_catalog, &t, 3, 0),
            Err(SynthError::TemplateMismatch(_))
        ));
    }

    #[test]
    fn complication_extends_task_and_runs_out() {
        let (t, db, catalog) = travel_env(1);
        let tasks = generate_tasks(&db, &catalog, &t, 12, 5).unwrap();
        let task = tasks.iter().find(|t| t.intent.as_deref() == Some("cancel_trip")).unwrap();
        let Complicated::Applied { task: harder, complication } = complicate_task(task, &catalog, &t, 0).unwrap() else {
            panic!("expected a complication");
        };
        assert_eq!(complication, "compensate");
        assert_eq!(harder.golden_calls.len(), task.golden_calls.len() + 1);
        assert!(harder.required_info.starts_with(&task.required_info));
        harder.replay_golden(&catalog).unwrap();
        assert_eq!(complicate_task(&harder, &catalog, &t, 0).unwrap(), Complicated::Unchanged(harder.clone()));
    }

    #[test]
    fn render_value_formats_numbers() {
        assert_eq!(render_value(&serde_json::json!(12.0)), "12");
        assert_eq!(render_value(&serde_json::json!(1134.5599999)), "1134.56");
        assert_eq!(render_value(&serde_json::json!("x")), "x");
    }
}
