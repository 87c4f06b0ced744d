//! Multi-run experiment: per-run pipeline, aggregation and output files.
//!
//! Output layout under the configured directory:
//!
//! ```text
//! run_NN/detector_metrics.csv      epoch,loss,val_accuracy
//! run_NN/security.csv              node_id,a,b,weight
//! run_NN/episodes_aware.csv        episode,epsilon,action,reward,greedy,millis
//! run_NN/episodes_baseline.csv     same; reward under the real weights
//! run_NN/detector.ckpt, agent_aware.ckpt, agent_baseline.ckpt
//! aggregate_aware.csv              episode,mean_reward,smoothed
//! aggregate_baseline.csv
//! intervals.csv                    agent,start,end,mean_reward
//! greedy.csv                       run,agent,action,reward,attacked_on_paths,attack_free_available,best_reward
//! timing.json                      wall-clock summary (not reproducible)
//! manifest.json                    config echo, seeds, versions, SHA-256 of every other file
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use netres_core::agent::{evaluate_greedy, AgentConfig, Environment, QModel};
use netres_core::metrics::{aggregate_runs, interval_average, smooth, IntervalMean};
use netres_core::sentinel::SecurityState;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checkpoint::{detector_checkpoint, qmodel_checkpoint};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::pipeline::{self, StageSeeds};
use crate::tables::{
    load_topology, read_episode_csv, write_detector_metrics_csv, write_episode_csv, write_security_csv, write_table,
};

pub const AGENTS: [&str; 2] = ["aware", "baseline"];

/// Greedy policy of one trained agent, evaluated under the run's weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyOutcome {
    pub action: usize,
    pub reward: f64,
    /// Attacked nodes on either path of the greedy pair.
    pub attacked_on_paths: usize,
    /// Whether some pair in the action space avoids every attacked node.
    pub attack_free_available: bool,
    /// Best reward over the whole action space.
    pub best_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub seeds: StageSeeds,
    pub weights: Vec<u32>,
    /// Per-episode rewards under the run's weights, aware then baseline.
    pub rewards: [Vec<f64>; 2],
    pub greedy: [GreedyOutcome; 2],
    pub detector_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub mean: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub intervals: Vec<IntervalMean>,
    pub smoothed_intervals: Vec<IntervalMean>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub output: PathBuf,
    pub runs: Vec<RunOutcome>,
    /// Aware then baseline.
    pub agents: [AgentSummary; 2],
}

#[derive(Debug, Default, Serialize)]
struct Timing {
    ms_per_episode_aware: f64,
    ms_per_episode_baseline: f64,
    packets_per_second: f64,
    detector_train_seconds: f64,
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Greedy action of `model` and the attack statistics of the chosen pair.
pub fn greedy_outcome(
    model: &QModel,
    env: &Environment,
    state: &SecurityState,
    config: &AgentConfig,
    attacked: &[usize],
) -> Result<GreedyOutcome> {
    let attacked: BTreeSet<usize> = attacked.iter().copied().collect();
    let hits = |a: usize| {
        let (p1, p2) = env.actions().paths(a);
        let nodes: BTreeSet<usize> = p1.nodes().iter().chain(p2.nodes()).copied().collect();
        nodes.intersection(&attacked).count()
    };
    let (action, reward) = evaluate_greedy(model, env, state, config)?;
    let all = 0..env.actions().len();
    Ok(GreedyOutcome {
        action,
        reward,
        attacked_on_paths: hits(action),
        attack_free_available: all.clone().any(|a| hits(a) == 0),
        best_reward: all.map(|a| env.reward(state.weights(), a, config)).fold(f64::NEG_INFINITY, f64::max),
    })
}

fn run_one(cfg: &ExperimentConfig, env: &Environment, index: usize, dir: &Path, timing: &mut Timing) -> Result<RunOutcome> {
    let seeds = StageSeeds::for_run(cfg.seed, index);
    let stage = |name: &str| format!("run {index}: {name}");
    let topology = env.topology();
    create_dir(dir)?;

    let traffic = pipeline::observed_traffic(cfg, topology, seeds.traffic)?;
    let train_set = pipeline::detector_training_set(cfg, &traffic, seeds.detector_data)?;
    let started = Instant::now();
    let (detector, metrics, det_cfg) =
        pipeline::fit_detector(cfg, &train_set, seeds.detector).map_err(|e| Error::stage(stage("train-detector"), e))?;
    timing.detector_train_seconds += started.elapsed().as_secs_f64();
    write_detector_metrics_csv(&dir.join("detector_metrics.csv"), &metrics)?;
    detector_checkpoint(&detector, &det_cfg).save(&dir.join("detector.ckpt"))?;

    let started = Instant::now();
    let (state, classified) = pipeline::assess(cfg, &detector, &traffic, topology.node_count())
        .map_err(|e| Error::stage(stage("assess"), e))?;
    let secs = started.elapsed().as_secs_f64();
    if secs > 0.0 {
        timing.packets_per_second += classified as f64 / secs;
    }
    write_security_csv(&dir.join("security.csv"), &state)?;

    let mut rewards: [Vec<f64>; 2] = Default::default();
    let mut greedy = Vec::new();
    for (k, name) in AGENTS.iter().enumerate() {
        let aware = k == 0;
        let seed = if aware { seeds.aware_agent } else { seeds.baseline_agent };
        let agent_cfg = AgentConfig { seed, attack_aware: aware, ..cfg.agent.clone() };
        let (model, logs, millis) = pipeline::fit_agent(env, &state, &agent_cfg, cfg.episodes, cfg.record_millis)
            .map_err(|e| Error::stage(stage(&format!("train-agent ({name})")), e))?;
        let per_episode = millis / cfg.episodes as f64;
        if aware {
            timing.ms_per_episode_aware += per_episode;
        } else {
            timing.ms_per_episode_baseline += per_episode;
        }
        write_episode_csv(&dir.join(format!("episodes_{name}.csv")), &logs)?;
        qmodel_checkpoint(&model, &agent_cfg).save(&dir.join(format!("agent_{name}.ckpt")))?;
        greedy.push(greedy_outcome(&model, env, &state, &agent_cfg, &cfg.attacked_nodes)?);
        rewards[k] = logs.iter().map(|l| l.reward).collect();
    }
    let detector_accuracy = metrics.iter().map(|m| m.val_accuracy).fold(0.0, f64::max);
    let greedy: [GreedyOutcome; 2] = greedy.try_into().expect("two agents");
    Ok(RunOutcome { seeds, weights: state.weights().to_vec(), rewards, greedy, detector_accuracy })
}

/// Mean curve, smoothed curve and interval tables of per-run series.
pub fn summarize<S: AsRef<[f64]>>(runs: &[S], window: usize, interval: usize) -> Result<AgentSummary> {
    let mean = aggregate_runs(runs)?;
    let smoothed = smooth(&mean, window)?;
    Ok(AgentSummary {
        intervals: interval_average(&mean, interval)?,
        smoothed_intervals: interval_average(&smoothed, interval)?,
        mean,
        smoothed,
    })
}

fn write_aggregates(out: &Path, agents: &[AgentSummary; 2]) -> Result<()> {
    for (name, s) in AGENTS.iter().zip(agents) {
        let rows: Vec<Vec<String>> = s
            .mean
            .iter()
            .zip(&s.smoothed)
            .enumerate()
            .map(|(i, (m, sm))| vec![i.to_string(), m.to_string(), sm.to_string()])
            .collect();
        write_table(&out.join(format!("aggregate_{name}.csv")), &["episode", "mean_reward", "smoothed"], &rows)?;
    }
    let rows: Vec<Vec<String>> = AGENTS
        .iter()
        .zip(agents)
        .flat_map(|(name, s)| {
            s.intervals.iter().map(move |iv| {
                vec![name.to_string(), iv.range.start.to_string(), iv.range.end.to_string(), iv.mean.to_string()]
            })
        })
        .collect();
    write_table(&out.join("intervals.csv"), &["agent", "start", "end", "mean_reward"], &rows)
}

fn write_greedy(out: &Path, runs: &[RunOutcome]) -> Result<()> {
    let mut rows = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        for (name, g) in AGENTS.iter().zip(&run.greedy) {
            rows.push(vec![
                i.to_string(),
                name.to_string(),
                g.action.to_string(),
                g.reward.to_string(),
                g.attacked_on_paths.to_string(),
                g.attack_free_available.to_string(),
                g.best_reward.to_string(),
            ]);
        }
    }
    let header =
        ["run", "agent", "action", "reward", "attacked_on_paths", "attack_free_available", "best_reward"];
    write_table(&out.join("greedy.csv"), &header, &rows)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::format(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// SHA-256 of every file under `dir` except the named top-level ones,
/// keyed by `/`-separated relative path.
fn hash_tree(dir: &Path, skip: &[&str]) -> Result<BTreeMap<String, String>> {
    fn walk(root: &Path, dir: &Path, skip: &[&str], out: &mut BTreeMap<String, String>) -> Result<()> {
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            let rel = path.strip_prefix(root).expect("under root");
            let key = rel.iter().map(|c| c.to_string_lossy()).collect::<Vec<_>>().join("/");
            if path.is_dir() {
                walk(root, &path, skip, out)?;
            } else if !skip.contains(&key.as_str()) {
                let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                out.insert(key, hex::encode(Sha256::digest(&bytes)));
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, skip, &mut out)?;
    Ok(out)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed_derivation: &'static str,
    config: &'a ExperimentConfig,
    topology_sha256: String,
    runs: Vec<StageSeeds>,
    files: BTreeMap<String, String>,
}

/// Runs every configured run and writes all outputs under `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let topology = load_topology(&cfg.topology)?;
    pipeline::check_nodes(&topology, &cfg.attacked_nodes, "attacked_nodes")?;
    let env = pipeline::environment(cfg, topology)?;
    let out = cfg.output.clone();
    create_dir(&out)?;

    let mut timing = Timing::default();
    let mut runs = Vec::with_capacity(cfg.runs);
    for index in 0..cfg.runs {
        runs.push(run_one(cfg, &env, index, &out.join(format!("run_{index:02}")), &mut timing)?);
    }
    let per_agent = |k: usize| runs.iter().map(|r| r.rewards[k].as_slice()).collect::<Vec<_>>();
    let agents = [
        summarize(&per_agent(0), cfg.smooth_window, cfg.interval)?,
        summarize(&per_agent(1), cfg.smooth_window, cfg.interval)?,
    ];
    write_aggregates(&out, &agents)?;
    write_greedy(&out, &runs)?;

    let n = cfg.runs as f64;
    timing.ms_per_episode_aware /= n;
    timing.ms_per_episode_baseline /= n;
    timing.packets_per_second /= n;
    write_json(&out.join("timing.json"), &timing)?;

    let topo_bytes = fs::read(&cfg.topology).map_err(|e| Error::io(&cfg.topology, e))?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed_derivation: "run i: seed + i; stage k of run seed s: s * 16 + k (traffic 0, detector_data 1, detector 2, aware_agent 3, baseline_agent 4)",
        config: cfg,
        topology_sha256: hex::encode(Sha256::digest(&topo_bytes)),
        runs: runs.iter().map(|r| r.seeds).collect(),
        files: hash_tree(&out, &["timing.json", "manifest.json"])?,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(ExperimentSummary { output: out, runs, agents })
}

/// Rebuilds both agents' summaries from the episode CSVs of a finished
/// experiment directory.
pub fn report(dir: &Path, window: usize, interval: usize) -> Result<[AgentSummary; 2]> {
    let mut run_dirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("run_")))
        .collect();
    run_dirs.sort();
    if run_dirs.is_empty() {
        return Err(Error::format(dir, "no run_* directories"));
    }
    let mut out = Vec::new();
    for name in AGENTS {
        let mut series = Vec::new();
        for d in &run_dirs {
            let logs = read_episode_csv(&d.join(format!("episodes_{name}.csv")))?;
            series.push(logs.iter().map(|l| l.reward).collect::<Vec<_>>());
        }
        out.push(summarize(&series, window, interval)?);
    }
    Ok(out.try_into().expect("two agents"))
}

/// Plain-text interval table of both agents.
pub fn render_report(agents: &[AgentSummary; 2]) -> String {
    let mut s = String::from("interval          aware        baseline\n");
    for (a, b) in agents[0].intervals.iter().zip(&agents[1].intervals) {
        let range = format!("{}-{}", a.range.start, a.range.end - 1);
        s.push_str(&format!("{range:<14} {:>10.2} {:>14.2}\n", a.mean, b.mean));
    }
    s
}
