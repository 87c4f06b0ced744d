//! Command-line front end. Every subcommand reads the experiment config;
//! `--seed` and `--out` override its root seed and output directory.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::checkpoint::{detector_checkpoint, detector_from_checkpoint, qmodel_checkpoint, Checkpoint};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::experiment::{greedy_outcome, render_report, report, run_experiment};
use crate::pipeline::{self, StageSeeds};
use crate::tables::{load_topology, read_security_csv, write_detector_metrics_csv, write_episode_csv, write_security_csv};
use crate::traffic_csv::{export_csv, ingest_csv, CsvSchema};
use netres_core::agent::AgentConfig;

#[derive(Debug, Parser)]
#[command(name = "netres", version, about = "Attack-aware path-pair routing experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Root seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run index whose derived seeds a single-stage command uses.
    #[arg(long, default_value_t = 0)]
    pub run: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the observed traffic of one run as `traffic.csv`.
    GenTraffic(#[command(flatten)] Common),
    /// Train the detector; writes `detector.ckpt` and `detector_metrics.csv`.
    TrainDetector {
        #[command(flatten)]
        common: Common,
        /// Labeled traffic CSV to train on instead of the configured source.
        #[arg(long)]
        traffic: Option<PathBuf>,
    },
    /// Classify traffic and write the resulting `security.csv`.
    Assess {
        #[command(flatten)]
        common: Common,
        /// Detector checkpoint; trained from the config when absent.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Traffic CSV; the configured source when absent.
        #[arg(long)]
        traffic: Option<PathBuf>,
    },
    /// Train one agent; writes `episodes_<agent>.csv` and `agent_<agent>.ckpt`.
    TrainAgent {
        #[command(flatten)]
        common: Common,
        /// Security snapshot to train against; assessed from the config when absent.
        #[arg(long)]
        security: Option<PathBuf>,
        /// Train the cost-only baseline instead of the attack-aware agent.
        #[arg(long)]
        baseline: bool,
    },
    /// Full multi-run experiment.
    Experiment(#[command(flatten)] Common),
    /// Interval table of a finished experiment directory (`--out`, else the config's output).
    Report(#[command(flatten)] Common),
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output = out.clone();
    }
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> Result<&Path> {
    std::fs::create_dir_all(&cfg.output).map_err(|e| Error::io(&cfg.output, e))?;
    Ok(&cfg.output)
}

/// Runs one command and returns the text to print on success.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::GenTraffic(common) => {
            let cfg = load(&common)?;
            let topology = load_topology(&cfg.topology)?;
            let seeds = StageSeeds::for_run(cfg.seed, common.run);
            let records = pipeline::observed_traffic(&cfg, &topology, seeds.traffic)?;
            let path = out_dir(&cfg)?.join("traffic.csv");
            export_csv(&path, &records, &cfg.detector.classes)?;
            Ok(format!("wrote {} records to {}", records.len(), path.display()))
        }
        Command::TrainDetector { common, traffic } => {
            let cfg = load(&common)?;
            let seeds = StageSeeds::for_run(cfg.seed, common.run);
            let records = match traffic {
                Some(path) => ingest_csv(&path, &CsvSchema::default(), &cfg.detector.classes)?,
                None => {
                    let topology = load_topology(&cfg.topology)?;
                    let observed = pipeline::observed_traffic(&cfg, &topology, seeds.traffic)?;
                    pipeline::detector_training_set(&cfg, &observed, seeds.detector_data)?
                }
            };
            let (model, metrics, det_cfg) = pipeline::fit_detector(&cfg, &records, seeds.detector)?;
            let dir = out_dir(&cfg)?;
            detector_checkpoint(&model, &det_cfg).save(&dir.join("detector.ckpt"))?;
            write_detector_metrics_csv(&dir.join("detector_metrics.csv"), &metrics)?;
            let best = metrics.iter().map(|m| m.val_accuracy).fold(0.0, f64::max);
            Ok(format!("{} epochs, best validation accuracy {best:.4}", model.epochs_run))
        }
        Command::Assess { common, model, traffic } => {
            let cfg = load(&common)?;
            let seeds = StageSeeds::for_run(cfg.seed, common.run);
            let topology = load_topology(&cfg.topology)?;
            let observed = match traffic {
                Some(path) => ingest_csv(&path, &CsvSchema::default(), &cfg.detector.classes)?,
                None => pipeline::observed_traffic(&cfg, &topology, seeds.traffic)?,
            };
            let detector = match model {
                Some(path) => detector_from_checkpoint(&Checkpoint::load(&path)?).map_err(|m| Error::format(&path, m))?,
                None => {
                    let set = pipeline::detector_training_set(&cfg, &observed, seeds.detector_data)?;
                    pipeline::fit_detector(&cfg, &set, seeds.detector)?.0
                }
            };
            let (state, classified) = pipeline::assess(&cfg, &detector, &observed, topology.node_count())?;
            let path = out_dir(&cfg)?.join("security.csv");
            write_security_csv(&path, &state)?;
            Ok(format!("classified {classified} packets; weights {:?}", state.weights()))
        }
        Command::TrainAgent { common, security, baseline } => {
            let cfg = load(&common)?;
            let seeds = StageSeeds::for_run(cfg.seed, common.run);
            let topology = load_topology(&cfg.topology)?;
            let state = match security {
                Some(path) => read_security_csv(&path)?,
                None => {
                    let observed = pipeline::observed_traffic(&cfg, &topology, seeds.traffic)?;
                    let set = pipeline::detector_training_set(&cfg, &observed, seeds.detector_data)?;
                    let detector = pipeline::fit_detector(&cfg, &set, seeds.detector)?.0;
                    pipeline::assess(&cfg, &detector, &observed, topology.node_count())?.0
                }
            };
            if state.node_count() != topology.node_count() {
                return Err(Error::Config(format!(
                    "security state has {} nodes, topology has {}",
                    state.node_count(),
                    topology.node_count()
                )));
            }
            let env = pipeline::environment(&cfg, topology)?;
            let (name, seed) = if baseline { ("baseline", seeds.baseline_agent) } else { ("aware", seeds.aware_agent) };
            let agent_cfg = AgentConfig { seed, attack_aware: !baseline, ..cfg.agent.clone() };
            let (model, logs, _) = pipeline::fit_agent(&env, &state, &agent_cfg, cfg.episodes, cfg.record_millis)?;
            let dir = out_dir(&cfg)?;
            write_episode_csv(&dir.join(format!("episodes_{name}.csv")), &logs)?;
            qmodel_checkpoint(&model, &agent_cfg).save(&dir.join(format!("agent_{name}.ckpt")))?;
            let g = greedy_outcome(&model, &env, &state, &agent_cfg, &cfg.attacked_nodes)?;
            Ok(format!(
                "{name} agent: {} actions, greedy action {} reward {} (best {})",
                env.actions().len(),
                g.action,
                g.reward,
                g.best_reward
            ))
        }
        Command::Experiment(common) => {
            let cfg = load(&common)?;
            let summary = run_experiment(&cfg)?;
            Ok(format!("wrote {}\n{}", summary.output.display(), render_report(&summary.agents)))
        }
        Command::Report(common) => {
            let cfg = load(&common)?;
            let agents = report(&cfg.output, cfg.smooth_window, cfg.interval)?;
            Ok(render_report(&agents))
        }
    }
}

/// Parses `args`, runs the command, prints the outcome and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
