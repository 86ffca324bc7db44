use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::EnvError;

/// Absolute tolerance for numeric field comparison.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub type Record = Map<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldType {
    String,
    Number,
    Integer,
    Boolean,
    Enum,
    /// Array of strings (ids when `references` is set).
    List,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDef {
    #[serde(rename = "type")]
    pub ty: FieldType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    /// Table whose keys this field (or each list element) must name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub references: Option<String>,
    #[serde(default = "yes")]
    pub required: bool,
}

impl FieldDef {
    pub fn of(ty: FieldType) -> Self {
        Self {
            ty,
            values: Vec::new(),
            references: None,
            required: true,
        }
    }

    pub fn enumeration(values: &[&str]) -> Self {
        Self {
            values: values.iter().map(|v| v.to_string()).collect(),
            ..Self::of(FieldType::Enum)
        }
    }

    pub fn reference(table: &str) -> Self {
        Self {
            references: Some(table.to_string()),
            ..Self::of(FieldType::String)
        }
    }

    pub fn reference_list(table: &str) -> Self {
        Self {
            references: Some(table.to_string()),
            ..Self::of(FieldType::List)
        }
    }

    /// Type check only; references are resolved by [`DomainDb::validate`].
    pub fn type_error(&self, value: &Value) -> Option<String> {
        let ok = match self.ty {
            FieldType::String => value.is_string(),
            FieldType::Number => value.is_number(),
            FieldType::Integer => {
                value.is_i64() || value.is_u64() || value.as_f64().is_some_and(|f| f.fract() == 0.0)
            }
            FieldType::Boolean => value.is_boolean(),
            FieldType::Enum => value
                .as_str()
                .is_some_and(|s| self.values.iter().any(|v| v == s)),
            FieldType::List => value
                .as_array()
                .is_some_and(|a| self.references.is_none() || a.iter().all(Value::is_string)),
        };
        (!ok).then(|| format!("expected {:?}, got {value}", self.ty))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSchema {
    pub key_field: String,
    pub fields: BTreeMap<String, FieldDef>,
}

/// One difference between two database states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub table: String,
    pub key: String,
    /// `*` when the whole record is missing on one side.
    pub field: String,
    pub expected: Value,
    pub actual: Value,
}

/// Schema plus keyed records, ordered canonically.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DomainDb {
    pub schema: BTreeMap<String, TableSchema>,
    pub entries: BTreeMap<String, BTreeMap<String, Record>>,
    #[serde(default)]
    pub version_counter: u64,
}

impl DomainDb {
    pub fn new(schema: BTreeMap<String, TableSchema>) -> Self {
        let entries = schema.keys().map(|t| (t.clone(), BTreeMap::new())).collect();
        Self {
            schema,
            entries,
            version_counter: 0,
        }
    }

    pub fn get(&self, table: &str, key: &str) -> Option<&Record> {
        self.entries.get(table)?.get(key)
    }

    pub fn table(&self, table: &str) -> Option<&BTreeMap<String, Record>> {
        self.entries.get(table)
    }

    pub fn entry_count(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    /// Inserts a record under its key field after a type check.
    pub fn insert(&mut self, table: &str, record: Record) -> Result<String, EnvError> {
        let schema = self
            .schema
            .get(table)
            .ok_or_else(|| EnvError::InvalidDb(vec![format!("unknown table `{table}`")]))?;
        let problems = record_problems(table, schema, &record);
        if !problems.is_empty() {
            return Err(EnvError::InvalidDb(problems));
        }
        let key = record[&schema.key_field]
            .as_str()
            .map(str::to_string)
            .unwrap_or_else(|| record[&schema.key_field].to_string());
        self.entries
            .entry(table.to_string())
            .or_default()
            .insert(key.clone(), record);
        Ok(key)
    }

    /// Checks field alignment with the schema and that every reference resolves.
    pub fn validate(&self) -> Result<(), EnvError> {
        let mut problems = Vec::new();
        for (table, records) in &self.entries {
            let Some(schema) = self.schema.get(table) else {
                problems.push(format!("table `{table}` has no schema"));
                continue;
            };
            for (key, record) in records {
                for p in record_problems(table, schema, record) {
                    problems.push(format!("{table}/{key}: {p}"));
                }
                match record.get(&schema.key_field) {
                    Some(Value::String(k)) if k == key => {}
                    other => problems.push(format!(
                        "{table}/{key}: key field `{}` is {other:?}",
                        schema.key_field
                    )),
                }
                problems.extend(self.reference_problems(table, schema, key, record));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(EnvError::InvalidDb(problems))
        }
    }

    pub(crate) fn reference_problems(
        &self,
        table: &str,
        schema: &TableSchema,
        key: &str,
        record: &Record,
    ) -> Vec<String> {
        let mut problems = Vec::new();
        for (field, def) in &schema.fields {
            let Some(target) = &def.references else { continue };
            let ids: Vec<&str> = match record.get(field) {
                Some(Value::String(s)) => vec![s.as_str()],
                Some(Value::Array(items)) => items.iter().filter_map(Value::as_str).collect(),
                _ => Vec::new(),
            };
            for id in ids {
                if self.get(target, id).is_none() {
                    problems.push(format!("{table}/{key}.{field}: `{id}` does not resolve in `{target}`"));
                }
            }
        }
        problems
    }

    /// Records elsewhere in the database that point at `table/key`.
    pub(crate) fn referrers(&self, table: &str, key: &str) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (other, schema) in &self.schema {
            for (field, def) in &schema.fields {
                if def.references.as_deref() != Some(table) {
                    continue;
                }
                for (k, record) in self.entries.get(other).into_iter().flatten() {
                    let hit = match record.get(field) {
                        Some(Value::String(s)) => s == key,
                        Some(Value::Array(items)) => items.iter().any(|v| v.as_str() == Some(key)),
                        _ => false,
                    };
                    if hit {
                        out.push((other.clone(), k.clone()));
                    }
                }
            }
        }
        out
    }

    /// Field-level differences, `self` as expected and `other` as actual.
    /// The version counter is ignored.
    pub fn diff(&self, other: &DomainDb) -> Vec<DiffEntry> {
        let mut out = Vec::new();
        let empty = BTreeMap::new();
        let tables: std::collections::BTreeSet<&String> =
            self.entries.keys().chain(other.entries.keys()).collect();
        for table in tables {
            let a = self.entries.get(table).unwrap_or(&empty);
            let b = other.entries.get(table).unwrap_or(&empty);
            let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for key in keys {
                match (a.get(key), b.get(key)) {
                    (Some(ra), Some(rb)) => {
                        let fields: std::collections::BTreeSet<&String> =
                            ra.keys().chain(rb.keys()).collect();
                        for field in fields {
                            let va = ra.get(field).unwrap_or(&Value::Null);
                            let vb = rb.get(field).unwrap_or(&Value::Null);
                            if !values_equal(va, vb) {
                                out.push(DiffEntry {
                                    table: table.clone(),
                                    key: key.clone(),
                                    field: field.clone(),
                                    expected: va.clone(),
                                    actual: vb.clone(),
                                });
                            }
                        }
                    }
                    (ra, rb) => out.push(DiffEntry {
                        table: table.clone(),
                        key: key.clone(),
                        field: "*".into(),
                        expected: ra.map(|r| Value::Object(r.clone())).unwrap_or(Value::Null),
                        actual: rb.map(|r| Value::Object(r.clone())).unwrap_or(Value::Null),
                    }),
                }
            }
        }
        out
    }

    pub fn content_eq(&self, other: &DomainDb) -> bool {
        self.diff(other).is_empty()
    }
}

fn record_problems(table: &str, schema: &TableSchema, record: &Record) -> Vec<String> {
    let mut problems = Vec::new();
    for (field, def) in &schema.fields {
        match record.get(field) {
            None | Some(Value::Null) if def.required => problems.push(format!("missing field `{field}`")),
            None | Some(Value::Null) => {}
            Some(v) => {
                if let Some(e) = def.type_error(v) {
                    problems.push(format!("field `{field}`: {e}"));
                }
            }
        }
    }
    for field in record.keys() {
        if !schema.fields.contains_key(field) {
            problems.push(format!("field `{field}` is not in the schema of `{table}`"));
        }
    }
    problems
}

/// Deep equality with numeric tolerance.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => (x - y).abs() <= FLOAT_TOLERANCE,
            _ => x == y,
        },
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(a, b)| values_equal(a, b))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len()
                && x.iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| values_equal(v, w)))
        }
        _ => a == b,
    }
}

/// Casefolds and collapses whitespace.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use serde_json::json;

    pub(crate) fn travel_db() -> DomainDb {
        let schema = BTreeMap::from([
            (
                "users".to_string(),
                TableSchema {
                    key_field: "user_id".into(),
                    fields: BTreeMap::from([
                        ("user_id".to_string(), FieldDef::of(FieldType::String)),
                        ("name".to_string(), FieldDef::of(FieldType::String)),
                        ("balance".to_string(), FieldDef::of(FieldType::Number)),
                    ]),
                },
            ),
            (
                "flights".to_string(),
                TableSchema {
                    key_field: "flight_id".into(),
                    fields: BTreeMap::from([
                        ("flight_id".to_string(), FieldDef::of(FieldType::String)),
                        ("status".to_string(), FieldDef::enumeration(&["on_time", "delayed", "cancelled"])),
                        ("seats".to_string(), FieldDef::of(FieldType::Integer)),
                    ]),
                },
            ),
            (
                "bookings".to_string(),
                TableSchema {
                    key_field: "booking_id".into(),
                    fields: BTreeMap::from([
                        ("booking_id".to_string(), FieldDef::of(FieldType::String)),
                        ("user_id".to_string(), FieldDef::reference("users")),
                        ("flight_id".to_string(), FieldDef::reference("flights")),
                        ("status".to_string(), FieldDef::enumeration(&["confirmed", "cancelled"])),
                    ]),
                },
            ),
        ]);
        let mut db = DomainDb::new(schema);
        let rec = |v: Value| v.as_object().unwrap().clone();
        db.insert("users", rec(json!({"user_id": "U1", "name": "Ada", "balance": 120.5}))).unwrap();
        db.insert("users", rec(json!({"user_id": "U2", "name": "Bo", "balance": 10.0}))).unwrap();
        db.insert("flights", rec(json!({"flight_id": "F100", "status": "on_time", "seats": 3}))).unwrap();
        db.insert("flights", rec(json!({"flight_id": "F200", "status": "delayed", "seats": 0}))).unwrap();
        db.insert(
            "bookings",
            rec(json!({"booking_id": "B1", "user_id": "U1", "flight_id": "F100", "status": "confirmed"})),
        )
        .unwrap();
        db.insert(
            "bookings",
            rec(json!({"booking_id": "B2", "user_id": "U2", "flight_id": "F200", "status": "confirmed"})),
        )
        .unwrap();
        db
    }

    #[test]
    fn fixture_is_valid() {
        let db = travel_db();
        db.validate().unwrap();
        assert_eq!(db.entry_count(), 6);
    }

    #[test]
    fn dangling_reference_detected() {
        let mut db = travel_db();
        db.entries.get_mut("bookings").unwrap().get_mut("B1").unwrap()["flight_id"] = json!("F999");
        match db.validate() {
            Err(EnvError::InvalidDb(p)) => assert!(p[0].contains("F999")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_mismatch_detected() {
        let mut db = travel_db();
        let rec = json!({"flight_id": "F3", "status": "boarding", "seats": 1.5});
        assert!(db.insert("flights", rec.as_object().unwrap().clone()).is_err());
    }

    #[test]
    fn diff_tolerates_tiny_float_noise() {
        let a = travel_db();
        let mut b = a.clone();
        b.entries.get_mut("users").unwrap().get_mut("U1").unwrap()["balance"] = json!(120.5 + 1e-12);
        b.version_counter = 7;
        assert!(a.content_eq(&b));
        b.entries.get_mut("users").unwrap().get_mut("U1").unwrap()["balance"] = json!(121.0);
        let d = a.diff(&b);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].table.as_str(), d[0].key.as_str(), d[0].field.as_str()), ("users", "U1", "balance"));
    }

    #[test]
    fn normalization_casefolds_and_collapses() {
        assert_eq!(normalize_text("  Hello\n  WORLD\t"), "hello world");
    }
}
