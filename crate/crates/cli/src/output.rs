//! Deterministic CSV/JSON writing and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Shortest decimal that parses back to the same `f64`; scientific notation
/// outside `[1e-5, 1e16)` keeps very small and very large values short.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub struct Table {
    /// Appended to the file stem; empty for the main table.
    pub suffix: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(suffix: &'static str, header: &[&'static str]) -> Self {
        Self {
            suffix,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Outputs {
    pub tables: Vec<Table>,
    pub summary: Value,
    /// One line for stdout.
    pub headline: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub tool_version: String,
    pub output_paths: Vec<String>,
}

/// Writes `<stem>[-suffix].csv`, `<stem>.json` and `<stem>.manifest.json`
/// into `dir`; paths in the manifest are relative to `dir`.
pub fn write_all(
    dir: &Path,
    stem: &str,
    command: &str,
    parameters: BTreeMap<String, Value>,
    outputs: &Outputs,
) -> Result<RunManifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut paths = Vec::new();
    for table in &outputs.tables {
        let name = if table.suffix.is_empty() {
            format!("{stem}.csv")
        } else {
            format!("{stem}-{}.csv", table.suffix)
        };
        let path = dir.join(&name);
        let mut w =
            csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        paths.push(name);
    }
    let summary_name = format!("{stem}.json");
    write_json(&dir.join(&summary_name), &outputs.summary)?;
    paths.push(summary_name);

    let seed = parameters.get("seed").and_then(Value::as_u64).unwrap_or(0);
    let manifest = RunManifest {
        command: command.to_string(),
        parameters,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        output_paths: paths,
    };
    write_json(&dir.join(format!("{stem}.manifest.json")), &manifest)?;
    Ok(manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
