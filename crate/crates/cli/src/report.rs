//! Command reports: a JSON body plus wall-clock timing, which is kept out of
//! the JSON rendering so that reruns are byte-identical.

use std::fmt::Write;

use serde_json::{json, Map, Value};
use spectral_lattice::HermitianMatrix;

use crate::document::NamedMatrix;

pub struct Report {
    pub summary: String,
    pub body: Map<String, Value>,
    pub timing: Value,
}

impl Report {
    pub fn new(command: &str, summary: impl Into<String>) -> Self {
        let summary = summary.into();
        let mut body = Map::new();
        body.insert("command".into(), json!(command));
        body.insert("summary".into(), json!(summary));
        Report {
            summary,
            body,
            timing: Value::Null,
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.body.insert(key.into(), value);
    }

    pub fn json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.body).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}\n", self.summary);
        for (key, value) in &self.body {
            if key != "summary" {
                flatten(key, value, &mut out);
            }
        }
        if !self.timing.is_null() {
            flatten("timing", &self.timing, &mut out);
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn flatten(key: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{key}.{k}"), v, out);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let row: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{key}: [{}]", row.join(", "));
        }
        Value::Array(items) if items.iter().all(|r| r.as_array().is_some_and(|r| r.iter().all(is_scalar))) => {
            let _ = writeln!(out, "{key}:");
            for row in items {
                let cells: Vec<String> = row.as_array().expect("checked").iter().map(scalar).collect();
                let _ = writeln!(out, "    [{}]", cells.join(", "));
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{key}[{i}]"), v, out);
            }
        }
        other => {
            let _ = writeln!(out, "{key}: {}", scalar(other));
        }
    }
}

pub fn matrix_value(h: &HermitianMatrix) -> Value {
    let m = NamedMatrix::from_hermitian("", h);
    match m.im {
        Some(im) => json!({ "re": m.re, "im": im }),
        None => json!({ "re": m.re }),
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
