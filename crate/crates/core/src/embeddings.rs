//! Import of externally produced code-embedding vectors (CSV or JSONL)
//! aligned to corpus record ids.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Fixed-dimension embedding rows keyed by record id.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub dim: usize,
    rows: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.rows.get(id).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(|s| s.as_str())
    }
}

#[derive(Deserialize)]
struct JsonRow {
    id: String,
    vector: Vec<f64>,
}

/// Read an embedding file and validate it against the corpus: exactly one
/// row per required id, every row `expected_dim` wide, every value finite.
///
/// The format is chosen by extension: `.jsonl`/`.ndjson` parse as JSONL
/// (`{"id": ..., "vector": [...]}`), anything else as CSV
/// (`id,v0,...,v{dim-1}`, header row optional).
pub fn import_embeddings(
    file: &Path,
    expected_dim: usize,
    required_ids: &BTreeSet<String>,
) -> Result<EmbeddingTable> {
    let text =
        std::fs::read_to_string(file).map_err(|e| Error::io(file.display().to_string(), e))?;
    let jsonl = matches!(
        file.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("ndjson")
    );
    let raw_rows = if jsonl {
        parse_jsonl(&text)?
    } else {
        parse_csv(&text, expected_dim)?
    };

    let mut rows = BTreeMap::new();
    for (lineno, (id, vector)) in raw_rows.into_iter().enumerate() {
        if vector.len() != expected_dim {
            return Err(Error::Data(format!(
                "embedding row `{id}`: got {} values, expected {expected_dim}",
                vector.len()
            )));
        }
        if let Some(col) = vector.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "embedding row `{id}` (line {}): non-finite value at column {col}",
                lineno + 1
            )));
        }
        if rows.insert(id.clone(), vector).is_some() {
            return Err(Error::Data(format!("embedding row `{id}` appears twice")));
        }
    }

    let present: BTreeSet<&String> = rows.keys().collect();
    let required: BTreeSet<&String> = required_ids.iter().collect();
    let missing: Vec<&str> = required.difference(&present).map(|s| s.as_str()).collect();
    let surplus: Vec<&str> = present.difference(&required).map(|s| s.as_str()).collect();
    if !missing.is_empty() || !surplus.is_empty() {
        return Err(Error::Data(format!(
            "embedding ids do not match the corpus: {} missing ({}), {} surplus ({})",
            missing.len(),
            sample_ids(&missing),
            surplus.len(),
            sample_ids(&surplus),
        )));
    }

    Ok(EmbeddingTable {
        dim: expected_dim,
        rows,
    })
}

fn sample_ids(ids: &[&str]) -> String {
    if ids.is_empty() {
        return "-".into();
    }
    let shown: Vec<&str> = ids.iter().take(10).copied().collect();
    let suffix = if ids.len() > 10 { ", ..." } else { "" };
    format!("{}{suffix}", shown.join(", "))
}

fn parse_jsonl(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonRow = serde_json::from_str(line)
            .map_err(|e| Error::Data(format!("embedding line {}: {e}", lineno + 1)))?;
        out.push((row.id, row.vector));
    }
    Ok(out)
}

fn parse_csv(text: &str, expected_dim: usize) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let id = fields
            .next()
            .ok_or_else(|| Error::Data(format!("embedding line {}: empty row", lineno + 1)))?
            .to_string();
        let rest: Vec<&str> = fields.collect();
        // optional header: first line whose values do not all parse as floats
        let values: std::result::Result<Vec<f64>, _> =
            rest.iter().map(|f| f.parse::<f64>()).collect();
        match values {
            Ok(v) => out.push((id, v)),
            Err(e) if lineno == 0 && (id == "id" || rest.len() == expected_dim) => {
                if id == "id" {
                    continue; // header row
                }
                return Err(Error::Data(format!("embedding line 1: {e}")));
            }
            Err(e) => return Err(Error::Data(format!("embedding line {}: {e}", lineno + 1))),
        }
    }
    Ok(out)
}
