//! Topology files and the small CSV tables written by the pipeline:
//! security snapshots, episode logs and detector training metrics.

use std::fs;
use std::path::Path;

use netres_core::agent::EpisodeLog;
use netres_core::detector::EpochMetrics;
use netres_core::netmodel::Topology;
use netres_core::sentinel::{BetaPosterior, SecurityState};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn load_topology(path: &Path) -> Result<Topology> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(Topology::parse(&text)?)
}

pub fn save_topology(path: &Path, topology: &Topology) -> Result<()> {
    fs::write(path, topology.to_string()).map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

/// The header is written explicitly so empty tables still carry one.
fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| Error::format(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::format(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads every row, checking the header matches `header` exactly.
fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let got = r.headers().map_err(|e| Error::format(path, e))?.clone();
    if !got.iter().eq(header.iter().copied()) {
        return Err(Error::format(path, format!("expected header {}", header.join(","))));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Row { path: path.into(), row: i + 1, message: e.to_string() }))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct SecurityRow {
    node_id: usize,
    a: f64,
    b: f64,
    weight: u32,
}

const SECURITY_HEADER: [&str; 4] = ["node_id", "a", "b", "weight"];

pub fn write_security_csv(path: &Path, state: &SecurityState) -> Result<()> {
    let rows = state.posteriors().into_iter().enumerate().map(|(node_id, p)| SecurityRow {
        node_id,
        a: p.a,
        b: p.b,
        weight: state.weights()[node_id],
    });
    write_rows(path, &SECURITY_HEADER, rows)
}

/// Loads a snapshot. Rows must list nodes `0..N` in order and each weight
/// must agree with its posterior.
pub fn read_security_csv(path: &Path) -> Result<SecurityState> {
    let rows: Vec<SecurityRow> = read_rows(path, &SECURITY_HEADER)?;
    let mut posteriors = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let bad = |message: String| Error::Row { path: path.into(), row: i + 1, message };
        if row.node_id != i {
            return Err(bad(format!("expected node_id {i}, found {}", row.node_id)));
        }
        let p = BetaPosterior::new(row.a, row.b).map_err(|e| bad(e.to_string()))?;
        if p.weight() != row.weight {
            return Err(bad(format!("weight {} disagrees with posterior (expected {})", row.weight, p.weight())));
        }
        posteriors.push(p);
    }
    Ok(SecurityState::from_posteriors(posteriors, 0)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct EpisodeRow {
    episode: usize,
    epsilon: f64,
    action: usize,
    reward: f64,
    greedy: bool,
    millis: f64,
}

const EPISODE_HEADER: [&str; 6] = ["episode", "epsilon", "action", "reward", "greedy", "millis"];

pub fn write_episode_csv(path: &Path, logs: &[EpisodeLog]) -> Result<()> {
    write_rows(
        path,
        &EPISODE_HEADER,
        logs.iter().map(|l| EpisodeRow {
            episode: l.episode,
            epsilon: l.epsilon,
            action: l.action,
            reward: l.reward,
            greedy: l.greedy,
            millis: l.millis,
        }),
    )
}

pub fn read_episode_csv(path: &Path) -> Result<Vec<EpisodeLog>> {
    let rows: Vec<EpisodeRow> = read_rows(path, &EPISODE_HEADER)?;
    for (i, r) in rows.iter().enumerate() {
        if r.episode != i {
            return Err(Error::Row { path: path.into(), row: i + 1, message: format!("episode {} out of sequence", r.episode) });
        }
    }
    Ok(rows
        .into_iter()
        .map(|r| EpisodeLog {
            episode: r.episode,
            epsilon: r.epsilon,
            action: r.action,
            reward: r.reward,
            greedy: r.greedy,
            millis: r.millis,
        })
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricsRow {
    epoch: usize,
    loss: f64,
    val_accuracy: f64,
}

const METRICS_HEADER: [&str; 3] = ["epoch", "loss", "val_accuracy"];

pub fn write_detector_metrics_csv(path: &Path, metrics: &[EpochMetrics]) -> Result<()> {
    write_rows(path, &METRICS_HEADER, metrics.iter().map(|m| MetricsRow { epoch: m.epoch, loss: m.loss, val_accuracy: m.val_accuracy }))
}

pub fn read_detector_metrics_csv(path: &Path) -> Result<Vec<EpochMetrics>> {
    let rows: Vec<MetricsRow> = read_rows(path, &METRICS_HEADER)?;
    Ok(rows.into_iter().map(|r| EpochMetrics { epoch: r.epoch, loss: r.loss, val_accuracy: r.val_accuracy }).collect())
}

/// Writes `header` then the rows of a numeric table.
pub(crate) fn write_table<R: AsRef<[String]>>(path: &Path, header: &[&str], rows: &[R]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| Error::format(path, e))?;
    for row in rows {
        w.write_record(row.as_ref()).map_err(|e| Error::format(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
