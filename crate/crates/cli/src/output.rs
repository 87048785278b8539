//! CSV and JSON rendering.

use serde_json::{json, Map, Value};

use crate::exec::Table;
use crate::job::{Format, JobSpec};

pub fn render(job: &JobSpec, table: &Table) -> String {
    match job.format {
        Format::Csv => csv(table),
        Format::Json => self::json(job, table),
    }
}

fn csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if !table.summary.is_empty() {
        let cells: Vec<String> = table.summary.iter().map(|(k, v)| format!("{k}={v:?}")).collect();
        out.push_str(&format!("# {}\n", cells.join(",")));
    }
    out
}

fn json(job: &JobSpec, table: &Table) -> String {
    let mut meta = Map::new();
    meta.insert("command".into(), json!(job.command.to_string()));
    meta.insert("columns".into(), json!(table.columns));
    meta.insert("job".into(), serde_json::to_value(job).expect("job serializes"));
    if !table.summary.is_empty() {
        let summary: Map<String, Value> = table.summary.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        meta.insert("summary".into(), Value::Object(summary));
    }
    let doc = json!({ "meta": meta, "rows": table.rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("finite values serialize");
    s.push('\n');
    s
}
