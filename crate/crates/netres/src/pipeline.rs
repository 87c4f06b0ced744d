//! Individual pipeline stages, shared by the CLI subcommands and the
//! experiment runner.

use std::time::Instant;

use netres_core::agent::{train_with_clock, AgentConfig, Clock, EpisodeLog, Environment, NoClock, QModel};
use netres_core::detector::{node_attack_ratio, train_detector, DetectorConfig, DetectorModel, EpochMetrics};
use netres_core::netmodel::{build_action_space, EnumerationLimits, Topology};
use netres_core::sentinel::{BetaPosterior, SecurityState};
use netres_core::traffic::{generate_dataset, generate_traffic, ClassMix, TrafficGenConfig, TrafficRecord};

use crate::config::{ExperimentConfig, TrafficSource};
use crate::error::{Error, Result};
use crate::traffic_csv::ingest_csv;

/// Seeds of one run's stages. Stage `k` of a run seeded `s` uses
/// `s * 16 + k` (wrapping), so no two (run, stage) pairs share a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StageSeeds {
    pub run: u64,
    pub traffic: u64,
    pub detector_data: u64,
    pub detector: u64,
    pub aware_agent: u64,
    pub baseline_agent: u64,
}

impl StageSeeds {
    pub fn for_run(root: u64, index: usize) -> Self {
        let run = root.wrapping_add(index as u64);
        let stage = |k: u64| run.wrapping_mul(16).wrapping_add(k);
        Self {
            run,
            traffic: stage(0),
            detector_data: stage(1),
            detector: stage(2),
            aware_agent: stage(3),
            baseline_agent: stage(4),
        }
    }
}

pub fn check_nodes(topology: &Topology, nodes: &[usize], what: &str) -> Result<()> {
    match nodes.iter().find(|&&n| n >= topology.node_count()) {
        Some(n) => Err(Error::Config(format!("{what}: node {n} outside a {}-node topology", topology.node_count()))),
        None => Ok(()),
    }
}

/// Environment for the config's two demands.
pub fn environment(cfg: &ExperimentConfig, topology: Topology) -> Result<Environment> {
    let [[s1, d1], [s2, d2]] = cfg.demands;
    let a = topology.demand(s1, d1)?;
    let b = topology.demand(s2, d2)?;
    let limits = EnumerationLimits { max_paths: cfg.max_paths, ..Default::default() };
    let space = build_action_space(&topology, a, b, limits)?;
    Ok(Environment::new(topology, space)?)
}

/// Observed traffic: synthetic (attacked nodes get the attack mix) or
/// ingested from CSV.
pub fn observed_traffic(cfg: &ExperimentConfig, topology: &Topology, seed: u64) -> Result<Vec<TrafficRecord>> {
    check_nodes(topology, &cfg.attacked_nodes, "attacked_nodes")?;
    match &cfg.traffic {
        TrafficSource::Synthetic(s) => {
            let gen = TrafficGenConfig {
                default_mix: s.background,
                node_mix: cfg.attacked_nodes.iter().map(|&n| (n, ClassMix::attacked(s.attack_share))).collect(),
                packets_per_node: s.packets_per_node,
                payload: s.payload,
                seed,
            };
            Ok(generate_traffic(&gen, topology)?)
        }
        TrafficSource::Csv { path, schema } => {
            let records = ingest_csv(path, schema, &cfg.detector.classes)?;
            let nodes: Vec<usize> = records.iter().map(|r| r.node_id).collect();
            check_nodes(topology, &nodes, &path.display().to_string())?;
            Ok(records)
        }
    }
}

/// Detector training set: a fresh labeled synthetic set, or the ingested
/// records themselves for CSV traffic.
pub fn detector_training_set(cfg: &ExperimentConfig, observed: &[TrafficRecord], seed: u64) -> Result<Vec<TrafficRecord>> {
    match cfg.traffic {
        TrafficSource::Synthetic(_) => {
            let d = &cfg.detector_data;
            Ok(generate_dataset(d.samples, d.mix, d.payload, seed)?)
        }
        TrafficSource::Csv { .. } => Ok(observed.to_vec()),
    }
}

pub fn fit_detector(
    cfg: &ExperimentConfig,
    records: &[TrafficRecord],
    seed: u64,
) -> Result<(DetectorModel, Vec<EpochMetrics>, DetectorConfig)> {
    let config = DetectorConfig { seed, ..cfg.detector.clone() };
    let (model, metrics) = train_detector(records, &config)?;
    Ok((model, metrics, config))
}

/// Folds the traffic into a security state over `windows` equal tick
/// windows. Also returns the number of packets classified.
pub fn assess(
    cfg: &ExperimentConfig,
    model: &DetectorModel,
    traffic: &[TrafficRecord],
    node_count: usize,
) -> Result<(SecurityState, usize)> {
    let prior = BetaPosterior::new(cfg.assessment.prior_a, cfg.assessment.prior_b)?;
    let mut state = SecurityState::with_nodes(node_count, prior)?;
    let (lo, hi) = match (traffic.iter().map(|r| r.timestamp).min(), traffic.iter().map(|r| r.timestamp).max()) {
        (Some(lo), Some(hi)) => (lo, hi + 1),
        _ => return Ok((state, 0)),
    };
    let windows = cfg.assessment.windows as u64;
    let span = hi - lo;
    let mut classified = 0;
    for k in 0..windows {
        let start = lo + span * k / windows;
        let end = lo + span * (k + 1) / windows;
        let counts = node_attack_ratio(model, traffic, start..end, node_count)?;
        classified += counts.iter().map(|c| c.1 as usize).sum::<usize>();
        state = state.observe_window(&counts)?;
    }
    Ok((state, classified))
}

/// Wall-clock milliseconds since construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now_millis(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

/// Trains one agent on a fixed state. Returns the model, the logs and the
/// total wall time in milliseconds.
pub fn fit_agent(
    env: &Environment,
    state: &SecurityState,
    config: &AgentConfig,
    episodes: usize,
    record_millis: bool,
) -> Result<(QModel, Vec<EpisodeLog>, f64)> {
    let start = Instant::now();
    let mut provider = state.clone();
    let (model, logs) = if record_millis {
        train_with_clock(env, &mut provider, config, episodes, &mut WallClock::new())?
    } else {
        train_with_clock(env, &mut provider, config, episodes, &mut NoClock)?
    };
    Ok((model, logs, start.elapsed().as_secs_f64() * 1e3))
}
