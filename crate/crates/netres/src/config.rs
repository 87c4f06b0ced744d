//! Experiment configuration, read from TOML. Field names match the TOML
//! keys one-to-one; see `fixtures/*.toml` for complete examples.

use std::fs;
use std::path::{Path, PathBuf};

use netres_core::agent::AgentConfig;
use netres_core::detector::DetectorConfig;
use netres_core::metrics::{DEFAULT_INTERVAL, DEFAULT_SMOOTH_WINDOW};
use netres_core::traffic::{ClassMix, PayloadBounds};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic_csv::CsvSchema;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Topology file. Relative paths are taken from the config file's directory.
    pub topology: PathBuf,
    /// Exactly two `[src, dst]` pairs.
    pub demands: [[usize; 2]; 2],
    pub traffic: TrafficSource,
    /// Nodes whose synthetic traffic is mostly malicious.
    #[serde(default)]
    pub attacked_nodes: Vec<usize>,
    /// Shared by both agents; `seed` and `attack_aware` are set per run.
    #[serde(default)]
    pub agent: AgentConfig,
    /// `seed` is set per run.
    #[serde(default)]
    pub detector: DetectorConfig,
    #[serde(default)]
    pub detector_data: DetectorData,
    #[serde(default)]
    pub assessment: Assessment,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    #[serde(default = "default_smooth")]
    pub smooth_window: usize,
    #[serde(default = "default_interval")]
    pub interval: usize,
    /// Cap on simple paths per demand; unset enumerates all of them.
    #[serde(default)]
    pub max_paths: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Root seed; run `i` uses `seed + i`.
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock milliseconds in episode CSVs. Off by default so the
    /// CSVs depend only on the config.
    #[serde(default)]
    pub record_millis: bool,
}

fn default_runs() -> usize {
    10
}
fn default_episodes() -> usize {
    10_000
}
fn default_smooth() -> usize {
    DEFAULT_SMOOTH_WINDOW
}
fn default_interval() -> usize {
    DEFAULT_INTERVAL
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrafficSource {
    Synthetic(SyntheticTraffic),
    Csv {
        path: PathBuf,
        #[serde(default)]
        schema: CsvSchema,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticTraffic {
    pub packets_per_node: usize,
    /// Malicious share of traffic at attacked nodes, split evenly between
    /// flood and brute force.
    pub attack_share: f64,
    /// Mix at every other node.
    pub background: ClassMix,
    pub payload: PayloadBounds,
}

impl Default for SyntheticTraffic {
    fn default() -> Self {
        Self { packets_per_node: 40, attack_share: 0.9, background: ClassMix::BENIGN, payload: PayloadBounds::default() }
    }
}

/// Labeled set the detector trains on when traffic is synthetic. With CSV
/// traffic the detector trains on the ingested records instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorData {
    pub samples: usize,
    pub mix: ClassMix,
    pub payload: PayloadBounds,
}

impl Default for DetectorData {
    fn default() -> Self {
        Self { samples: 1000, mix: ClassMix::BALANCED, payload: PayloadBounds::default() }
    }
}

/// How observed traffic becomes a security state: the prior, and how many
/// equal tick windows the traffic is folded in as.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Assessment {
    pub prior_a: f64,
    pub prior_b: f64,
    pub windows: usize,
}

impl Default for Assessment {
    fn default() -> Self {
        Self { prior_a: 1.0, prior_b: 1.0, windows: 4 }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file, resolving input paths against
    /// its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.topology = base.join(&cfg.topology);
        if let TrafficSource::Csv { path, .. } = &mut cfg.traffic {
            *path = base.join(&*path);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that does not need the topology file.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.runs == 0 {
            return fail("runs must be >= 1");
        }
        if self.episodes == 0 {
            return fail("episodes must be >= 1");
        }
        if self.smooth_window == 0 || self.interval == 0 {
            return fail("smooth_window and interval must be >= 1");
        }
        if self.assessment.windows == 0 {
            return fail("assessment.windows must be >= 1");
        }
        if self.detector_data.samples == 0 {
            return fail("detector_data.samples must be >= 1");
        }
        if let TrafficSource::Synthetic(s) = &self.traffic {
            if !(0.0..=1.0).contains(&s.attack_share) {
                return fail("traffic.attack_share must be in [0, 1]");
            }
            s.background.validate()?;
            s.payload.validate()?;
        }
        self.detector_data.mix.validate()?;
        self.detector_data.payload.validate()?;
        netres_core::sentinel::BetaPosterior::new(self.assessment.prior_a, self.assessment.prior_b)?;
        self.agent.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.detector.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}
