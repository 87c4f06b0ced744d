//! Traffic CSV: `node_id,payload_hex,label,timestamp`, payload as lowercase
//! hex, label as a class name.

use std::collections::BTreeMap;
use std::path::Path;

use netres_core::traffic::{ClassSet, TrafficRecord};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tables::csv_writer;

pub const TRAFFIC_HEADER: [&str; 4] = ["node_id", "payload_hex", "label", "timestamp"];

/// Which columns hold which field, and how raw label tokens map onto the
/// class set. The defaults read files written by [`export_csv`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvSchema {
    pub node_id: String,
    pub payload_hex: String,
    pub label: String,
    /// Without a timestamp column, the 0-based data row index is used.
    pub timestamp: Option<String>,
    /// Raw label token → class name. Tokens not listed here are looked up
    /// as class names directly.
    pub labels: BTreeMap<String, String>,
    /// Class for tokens that match nothing; `None` rejects them.
    pub unknown_label: Option<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            node_id: "node_id".into(),
            payload_hex: "payload_hex".into(),
            label: "label".into(),
            timestamp: Some("timestamp".into()),
            labels: BTreeMap::new(),
            unknown_label: None,
        }
    }
}

pub fn export_csv(path: &Path, records: &[TrafficRecord], classes: &ClassSet) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRAFFIC_HEADER).map_err(|e| Error::format(path, e))?;
    for r in records {
        let label = classes.name(r.label)?;
        let row = [r.node_id.to_string(), hex::encode(&r.payload), label.to_string(), r.timestamp.to_string()];
        w.write_record(&row).map_err(|e| Error::format(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn ingest_csv(path: &Path, schema: &CsvSchema, classes: &ClassSet) -> Result<Vec<TrafficRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let header = reader.headers().map_err(|e| Error::format(path, e))?.clone();
    let column = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::format(path, format!("missing column `{name}`")))
    };
    let node_col = column(&schema.node_id)?;
    let payload_col = column(&schema.payload_hex)?;
    let label_col = column(&schema.label)?;
    let time_col = schema.timestamp.as_deref().map(column).transpose()?;

    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let bad = |message: String| Error::Row { path: path.into(), row: i + 1, message };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| row.get(c).unwrap_or("").trim();
        let node_id = field(node_col).parse::<usize>().map_err(|e| bad(format!("node_id: {e}")))?;
        let hex_text = field(payload_col);
        if hex_text.is_empty() {
            return Err(bad("empty payload".into()));
        }
        let payload = hex::decode(hex_text).map_err(|e| bad(format!("payload_hex: {e}")))?;
        let label = resolve_label(field(label_col), schema, classes).map_err(bad)?;
        let timestamp = match time_col {
            Some(c) => field(c).parse::<u64>().map_err(|e| bad(format!("timestamp: {e}")))?,
            None => i as u64,
        };
        out.push(TrafficRecord::new(node_id, payload, label, timestamp).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

fn resolve_label(
    token: &str,
    schema: &CsvSchema,
    classes: &ClassSet,
) -> std::result::Result<netres_core::traffic::ClassId, String> {
    let name = schema.labels.get(token).map(String::as_str).unwrap_or(token);
    if let Ok(id) = classes.id(name) {
        return Ok(id);
    }
    match &schema.unknown_label {
        Some(fallback) => classes.id(fallback).map_err(|e| e.to_string()),
        None => Err(format!("unknown label `{token}`")),
    }
}
