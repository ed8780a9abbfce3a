//! The JSON report written by every command:
//! `{schema, command, verdict, universe, witnesses, timings}`.
//!
//! Everything except `timings` is a function of the inputs and caps, so
//! two runs print identical reports once `timings` is removed.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::analyses::Verdict;

pub const SCHEMA_VERSION: &str = "gadtparam-report/1";

/// The JSON schema of [`Report`], as shipped in `schema/report-v1.json`.
pub const SCHEMA: &str = include_str!("../../../schema/report-v1.json");

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub verdict: ReportVerdict,
    pub universe: Value,
    pub witnesses: Vec<Value>,
    /// Seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

/// The outcome of a check or of a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportVerdict {
    Pass,
    Fail,
    Inconclusive,
    NotApplicable,
    /// A query (such as `relate` or `gmap`) was answered.
    Answered,
}

impl From<Verdict> for ReportVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => ReportVerdict::Pass,
            Verdict::Fail => ReportVerdict::Fail,
            Verdict::Inconclusive => ReportVerdict::Inconclusive,
            Verdict::NotApplicable => ReportVerdict::NotApplicable,
        }
    }
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: impl Into<ReportVerdict>, universe: Value) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            verdict: verdict.into(),
            universe,
            witnesses: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn witness(mut self, w: Value) -> Report {
        self.witnesses.push(w);
        self
    }

    pub fn timing(mut self, phase: &str, d: Duration) -> Report {
        self.timings.insert(phase.to_string(), d.as_secs_f64());
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Checks the structural requirements of the schema on `v`: required keys,
/// their JSON types and the verdict vocabulary.
pub fn validate(v: &Value) -> Result<(), String> {
    let schema: Value = serde_json::from_str(SCHEMA).map_err(|e| format!("schema: {e}"))?;
    let obj = v.as_object().ok_or("report is not an object")?;
    let props = schema["properties"].as_object().ok_or("schema has no properties")?;
    for key in schema["required"].as_array().ok_or("schema has no required list")? {
        let key = key.as_str().ok_or("bad required entry")?;
        let value = obj.get(key).ok_or_else(|| format!("missing `{key}`"))?;
        let field = &props[key];
        if let Some(ty) = field["type"].as_str() {
            let ok = match ty {
                "string" => value.is_string(),
                "object" => value.is_object(),
                "array" => value.is_array(),
                _ => true,
            };
            if !ok {
                return Err(format!("`{key}` is not of type {ty}"));
            }
        }
        if let Some(options) = field["enum"].as_array() {
            if !options.contains(value) {
                return Err(format!("`{key}` = {value} is not one of {}", Value::Array(options.clone())));
            }
        }
        if let Some(c) = field.get("const") {
            if c != value {
                return Err(format!("`{key}` must be {c}"));
            }
        }
    }
    if let Some(extra) = obj.keys().find(|k| !props.contains_key(*k)) {
        return Err(format!("unexpected key `{extra}`"));
    }
    if let Some(t) = obj["timings"].as_object() {
        if t.values().any(|x| !x.is_number()) {
            return Err("timings must be numbers".into());
        }
    }
    Ok(())
}
