//! Executable semantics of domain functions over a [`DomainDb`].
//!
//! Every operation validates completely before it writes, so a failing call
//! leaves the database untouched.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use super::db::{normalize_text, DomainDb, Record};
use crate::tool_registry::ToolCall;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueSource {
    Param(String),
    Fixed(Value),
}

/// Precondition on the current value of a field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub field: String,
    pub not_in: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DomainOp {
    /// Read one record by key.
    Get { table: String, key_param: String },
    /// Read every record whose `field` matches the argument (casefolded for text,
    /// membership for lists).
    Search {
        table: String,
        field: String,
        value_param: String,
    },
    /// Overwrite one field.
    SetField {
        table: String,
        key_param: String,
        field: String,
        value: ValueSource,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        guard: Option<Guard>,
    },
    /// Add `sign·amount` to a numeric field.
    Adjust {
        table: String,
        key_param: String,
        field: String,
        amount_param: String,
        sign: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_result: Option<f64>,
    },
    /// Move `amount` of a numeric field from one record to another; the source may not go negative.
    Transfer {
        table: String,
        from_param: String,
        to_param: String,
        field: String,
        amount_param: String,
    },
    /// Create a record keyed by `key_param`.
    Insert {
        table: String,
        key_param: String,
        #[serde(default)]
        field_params: BTreeMap<String, String>,
        #[serde(default)]
        defaults: BTreeMap<String, Value>,
    },
    /// Remove a record that nothing else references.
    Delete { table: String, key_param: String },
}

impl DomainOp {
    pub fn table(&self) -> &str {
        match self {
            DomainOp::Get { table, .. }
            | DomainOp::Search { table, .. }
            | DomainOp::SetField { table, .. }
            | DomainOp::Adjust { table, .. }
            | DomainOp::Transfer { table, .. }
            | DomainOp::Insert { table, .. }
            | DomainOp::Delete { table, .. } => table,
        }
    }

    pub fn is_write(&self) -> bool {
        !matches!(self, DomainOp::Get { .. } | DomainOp::Search { .. })
    }
}

#[derive(Debug)]
pub(crate) struct OpOutcome {
    pub payload: String,
    pub touched: Vec<(String, String)>,
    pub wrote: bool,
}

fn arg<'a>(call: &'a ToolCall, name: &str) -> Result<&'a Value, String> {
    call.arguments
        .get(name)
        .filter(|v| !v.is_null())
        .ok_or_else(|| format!("missing argument `{name}`"))
}

fn key_arg(call: &ToolCall, name: &str) -> Result<String, String> {
    match arg(call, name)? {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(format!("argument `{name}` must be an id, got {other}")),
    }
}

fn amount_arg(call: &ToolCall, name: &str) -> Result<f64, String> {
    let amount = arg(call, name)?
        .as_f64()
        .ok_or_else(|| format!("argument `{name}` must be numeric"))?;
    if !(amount.is_finite() && amount > 0.0) {
        return Err(format!("constraint violation: `{name}` must be positive"));
    }
    Ok(amount)
}

fn existing<'a>(db: &'a DomainDb, table: &str, key: &str) -> Result<&'a Record, String> {
    db.get(table, key)
        .ok_or_else(|| format!("no record `{key}` in `{table}`"))
}

fn numeric_field(record: &Record, field: &str, key: &str) -> Result<f64, String> {
    record
        .get(field)
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("field `{field}` of `{key}` is not numeric"))
}

fn number(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn to_json(record: &Record) -> String {
    serde_json::to_string(record).unwrap_or_default()
}

fn matches(value: &Value, wanted: &Value) -> bool {
    match (value, wanted) {
        (Value::String(a), Value::String(b)) => normalize_text(a) == normalize_text(b),
        (Value::Array(items), w) => items.iter().any(|v| matches(v, w)),
        (Value::Number(a), Value::Number(b)) => a.as_f64() == b.as_f64(),
        (a, b) => a == b,
    }
}

fn check_field_value(db: &DomainDb, table: &str, field: &str, value: &Value) -> Result<(), String> {
    let schema = &db.schema[table];
    let def = schema
        .fields
        .get(field)
        .ok_or_else(|| format!("`{table}` has no field `{field}`"))?;
    if let Some(e) = def.type_error(value) {
        return Err(format!("constraint violation: field `{field}` {e}"));
    }
    if let Some(target) = &def.references {
        let ids: Vec<&str> = match value {
            Value::String(s) => vec![s],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        if let Some(bad) = ids.iter().find(|id| db.get(target, id).is_none()) {
            return Err(format!("constraint violation: `{bad}` does not exist in `{target}`"));
        }
    }
    Ok(())
}

pub(crate) fn apply(db: &mut DomainDb, op: &DomainOp, call: &ToolCall) -> Result<OpOutcome, String> {
    let table = op.table().to_string();
    if !db.schema.contains_key(&table) {
        return Err(format!("unknown table `{table}`"));
    }
    match op {
        DomainOp::Get { key_param, .. } => {
            let key = key_arg(call, key_param)?;
            let record = existing(db, &table, &key)?;
            Ok(OpOutcome {
                payload: to_json(record),
                touched: vec![(table, key)],
                wrote: false,
            })
        }
        DomainOp::Search {
            field, value_param, ..
        } => {
            let wanted = arg(call, value_param)?.clone();
            let mut hits = Vec::new();
            let mut touched = Vec::new();
            for (key, record) in db.table(&table).into_iter().flatten() {
                if record.get(field).is_some_and(|v| matches(v, &wanted)) {
                    hits.push(Value::Object(record.clone()));
                    touched.push((table.clone(), key.clone()));
                }
            }
            Ok(OpOutcome {
                payload: Value::Array(hits).to_string(),
                touched,
                wrote: false,
            })
        }
        DomainOp::SetField {
            key_param,
            field,
            value,
            guard,
            ..
        } => {
            let key = key_arg(call, key_param)?;
            let record = existing(db, &table, &key)?;
            if let Some(g) = guard {
                let current = record.get(&g.field).cloned().unwrap_or(Value::Null);
                if g.not_in.contains(&current) {
                    return Err(format!(
                        "constraint violation: `{key}` has {} = {current}",
                        g.field
                    ));
                }
            }
            let new_value = match value {
                ValueSource::Param(p) => arg(call, p)?.clone(),
                ValueSource::Fixed(v) => v.clone(),
            };
            check_field_value(db, &table, field, &new_value)?;
            let record = db.entries.get_mut(&table).and_then(|t| t.get_mut(&key)).expect("checked");
            record.insert(field.clone(), new_value);
            Ok(OpOutcome {
                payload: to_json(record),
                touched: vec![(table, key)],
                wrote: true,
            })
        }
        DomainOp::Adjust {
            key_param,
            field,
            amount_param,
            sign,
            min_result,
            ..
        } => {
            let key = key_arg(call, key_param)?;
            let amount = amount_arg(call, amount_param)?;
            let current = numeric_field(existing(db, &table, &key)?, field, &key)?;
            let next = current + sign * amount;
            if min_result.is_some_and(|m| next < m) {
                return Err(format!("constraint violation: `{key}` {field} would drop to {next}"));
            }
            let record = db.entries.get_mut(&table).and_then(|t| t.get_mut(&key)).expect("checked");
            record.insert(field.clone(), number(next));
            Ok(OpOutcome {
                payload: to_json(record),
                touched: vec![(table, key)],
                wrote: true,
            })
        }
        DomainOp::Transfer {
            from_param,
            to_param,
            field,
            amount_param,
            ..
        } => {
            let from = key_arg(call, from_param)?;
            let to = key_arg(call, to_param)?;
            if from == to {
                return Err("constraint violation: source and destination are the same".into());
            }
            let amount = amount_arg(call, amount_param)?;
            let from_balance = numeric_field(existing(db, &table, &from)?, field, &from)?;
            let to_balance = numeric_field(existing(db, &table, &to)?, field, &to)?;
            if from_balance < amount {
                return Err(format!(
                    "constraint violation: `{from}` has {from_balance} {field}, needs {amount}"
                ));
            }
            let records = db.entries.get_mut(&table).expect("checked");
            records.get_mut(&from).expect("checked").insert(field.clone(), number(from_balance - amount));
            records.get_mut(&to).expect("checked").insert(field.clone(), number(to_balance + amount));
            Ok(OpOutcome {
                payload: format!(
                    "{{\"from\":{},\"to\":{}}}",
                    to_json(&records[&from]),
                    to_json(&records[&to])
                ),
                touched: vec![(table.clone(), from), (table, to)],
                wrote: true,
            })
        }
        DomainOp::Insert {
            key_param,
            field_params,
            defaults,
            ..
        } => {
            let key = key_arg(call, key_param)?;
            if db.get(&table, &key).is_some() {
                return Err(format!("constraint violation: `{key}` already exists in `{table}`"));
            }
            let key_field = db.schema[&table].key_field.clone();
            let mut record = Record::new();
            record.insert(key_field, Value::String(key.clone()));
            for (field, value) in defaults {
                record.insert(field.clone(), value.clone());
            }
            for (field, param) in field_params {
                if let Some(v) = call.arguments.get(param).filter(|v| !v.is_null()) {
                    record.insert(field.clone(), v.clone());
                }
            }
            let schema = &db.schema[&table];
            for (field, def) in &schema.fields {
                match record.get(field) {
                    Some(v) => check_field_value(db, &table, field, v)?,
                    None if def.required => return Err(format!("missing value for field `{field}`")),
                    None => {}
                }
            }
            if let Some(extra) = record.keys().find(|f| !schema.fields.contains_key(*f)) {
                return Err(format!("`{table}` has no field `{extra}`"));
            }
            let payload = to_json(&record);
            db.entries.entry(table.clone()).or_default().insert(key.clone(), record);
            Ok(OpOutcome {
                payload,
                touched: vec![(table, key)],
                wrote: true,
            })
        }
        DomainOp::Delete { key_param, .. } => {
            let key = key_arg(call, key_param)?;
            existing(db, &table, &key)?;
            let referrers = db.referrers(&table, &key);
            if let Some((t, k)) = referrers.first() {
                return Err(format!("constraint violation: `{key}` is referenced by {t}/{k}"));
            }
            let record = db.entries.get_mut(&table).and_then(|t| t.remove(&key)).expect("checked");
            Ok(OpOutcome {
                payload: to_json(&record),
                touched: vec![(table, key)],
                wrote: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env_sim::db::tests::travel_db;
    use serde_json::json;

    fn call(args: Value) -> ToolCall {
        ToolCall::new("op", args)
    }

    #[test]
    fn transfer_checks_balance_before_writing() {
        let mut db = travel_db();
        let op = DomainOp::Transfer {
            table: "users".into(),
            from_param: "from".into(),
            to_param: "to".into(),
            field: "balance".into(),
            amount_param: "amount".into(),
        };
        let before = db.clone();
        assert!(apply(&mut db, &op, &call(json!({"from": "U2", "to": "U1", "amount": 50}))).is_err());
        assert_eq!(db, before);
        let out = apply(&mut db, &op, &call(json!({"from": "U1", "to": "U2", "amount": 20.5}))).unwrap();
        assert!(out.wrote);
        assert_eq!(db.get("users", "U1").unwrap()["balance"], json!(100.0));
        assert_eq!(db.get("users", "U2").unwrap()["balance"], json!(30.5));
    }

    #[test]
    fn insert_validates_references() {
        let mut db = travel_db();
        let op = DomainOp::Insert {
            table: "bookings".into(),
            key_param: "booking_id".into(),
            field_params: BTreeMap::from([
                ("user_id".to_string(), "user_id".to_string()),
                ("flight_id".to_string(), "flight_id".to_string()),
            ]),
            defaults: BTreeMap::from([("status".to_string(), json!("confirmed"))]),
        };
        let before = db.clone();
        let bad = call(json!({"booking_id": "B9", "user_id": "U1", "flight_id": "F404"}));
        assert!(apply(&mut db, &op, &bad).is_err());
        assert_eq!(db, before);
        let good = call(json!({"booking_id": "B9", "user_id": "U1", "flight_id": "F200"}));
        apply(&mut db, &op, &good).unwrap();
        db.validate().unwrap();
        assert!(apply(&mut db, &op, &good).unwrap_err().contains("already exists"));
    }

    #[test]
    fn delete_refuses_referenced_records() {
        let mut db = travel_db();
        let op = DomainOp::Delete {
            table: "flights".into(),
            key_param: "flight_id".into(),
        };
        let err = apply(&mut db, &op, &call(json!({"flight_id": "F100"}))).unwrap_err();
        assert!(err.contains("referenced"));
        let op = DomainOp::Delete {
            table: "bookings".into(),
            key_param: "booking_id".into(),
        };
        apply(&mut db, &op, &call(json!({"booking_id": "B1"}))).unwrap();
        assert!(db.get("bookings", "B1").is_none());
    }

    #[test]
    fn search_is_case_insensitive_and_touches_hits() {
        let mut db = travel_db();
        let op = DomainOp::Search {
            table: "flights".into(),
            field: "status".into(),
            value_param: "status".into(),
        };
        let out = apply(&mut db, &op, &call(json!({"status": "DELAYED"}))).unwrap();
        assert_eq!(out.touched, vec![("flights".to_string(), "F200".to_string())]);
        assert!(!out.wrote);
    }

    #[test]
    fn guard_blocks_repeat_cancellation() {
        let mut db = travel_db();
        let op = DomainOp::SetField {
            table: "bookings".into(),
            key_param: "booking_id".into(),
            field: "status".into(),
            value: ValueSource::Fixed(json!("cancelled")),
            guard: Some(Guard {
                field: "status".into(),
                not_in: vec![json!("cancelled")],
            }),
        };
        apply(&mut db, &op, &call(json!({"booking_id": "B1"}))).unwrap();
        let err = apply(&mut db, &op, &call(json!({"booking_id": "B1"}))).unwrap_err();
        assert!(err.starts_with("constraint violation"));
    }
}
