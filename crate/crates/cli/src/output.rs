use std::io::Write;

use anyhow::Context;
use serde::Serialize;
use serde_json::{Map, Value};
use trace_conjunction_core::Params;

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Skip {
    pub id: String,
    pub params: Params,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// Top-level document written by every subcommand.
#[derive(Debug, Serialize)]
pub struct Document {
    pub command: &'static str,
    pub config: RunConfig,
    pub reports: Vec<Value>,
    pub skipped: Vec<Skip>,
    pub summary: Summary,
}

impl Document {
    /// Builds the document; each report must carry a boolean `pass`.
    pub fn new(
        command: &'static str,
        config: RunConfig,
        reports: Vec<Value>,
        skipped: Vec<Skip>,
    ) -> Self {
        let passed = reports
            .iter()
            .filter(|r| r["pass"] == Value::Bool(true))
            .count();
        let summary = Summary {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
            skipped: skipped.len(),
            pass: passed == reports.len(),
        };
        Document {
            command,
            config,
            reports,
            skipped,
            summary,
        }
    }
}

fn flatten_into(prefix: &str, value: &Value, out: &mut Map<String, Value>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(&key(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(&key(&i.to_string()), v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

/// Nested records become dot-separated columns (`lhs.value`, `params.N`, `values.0.stderr`).
pub fn flatten(value: &Value) -> Map<String, Value> {
    let mut out = Map::new();
    flatten_into("", value, &mut out);
    out
}

fn cell(value: Option<&Value>) -> String {
    match value {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
    }
}

/// One row per report; the header is the union of keys in first-seen order.
pub fn to_csv(reports: &[Value]) -> anyhow::Result<Vec<u8>> {
    let rows: Vec<Map<String, Value>> = reports.iter().map(flatten).collect();
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for k in row.keys() {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header)?;
    for row in &rows {
        writer.write_record(header.iter().map(|k| cell(row.get(k))))?;
    }
    writer.into_inner().context("flushing csv")
}

pub fn write(doc: &Document, format: Format, out: Option<&str>) -> anyhow::Result<()> {
    let bytes = match format {
        Format::Json => {
            let mut b = serde_json::to_vec_pretty(doc)?;
            b.push(b'\n');
            b
        }
        Format::Csv => to_csv(&doc.reports)?,
    };
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {path}")),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
