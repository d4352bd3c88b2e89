use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use symtest::Mode;

use crate::args::Format;
use crate::Failure;

pub struct Row {
    pub params: Vec<(&'static str, f64)>,
    pub estimate: f64,
    pub exact: f64,
    pub shots: u64,
    pub seed: u64,
    pub mode: Mode,
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::new();
    let mut header: Vec<&str> = rows
        .first()
        .map_or(vec![], |r| r.params.iter().map(|p| p.0).collect());
    header.extend(["estimate", "exact", "shots", "seed", "mode"]);
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        let mut cells: Vec<String> = r.params.iter().map(|p| p.1.to_string()).collect();
        cells.push(r.estimate.to_string());
        cells.push(r.exact.to_string());
        cells.push(r.shots.to_string());
        cells.push(r.seed.to_string());
        cells.push(r.mode.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(rows: &[Row]) -> String {
    let list: Vec<Value> = rows
        .iter()
        .map(|r| {
            let params: Map<String, Value> = r
                .params
                .iter()
                .map(|&(k, v)| (k.to_string(), json!(v)))
                .collect();
            json!({
                "params": params,
                "estimate": r.estimate,
                "exact": r.exact,
                "shots": r.shots,
                "seed": r.seed,
                "mode": r.mode.to_string(),
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&list).expect("plain values serialize");
    s.push('\n');
    s
}

pub fn write_rows(rows: &[Row], format: Format, path: Option<&Path>) -> Result<(), Failure> {
    let text = match format {
        Format::Csv => render_csv(rows),
        Format::Json => render_json(rows),
    };
    let io = |e: std::io::Error| Failure::Parse(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io),
    }
}
