use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use netres::config::{ExperimentConfig, TrafficSource};
use netres::experiment::{report, run_experiment};
use netres::tables::read_episode_csv;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn cycle4(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::load(&fixture("cycle4.toml")).unwrap();
    cfg.output = out.to_path_buf();
    cfg
}

const TOP_LEVEL: [&str; 7] = [
    "aggregate_aware.csv",
    "aggregate_baseline.csv",
    "greedy.csv",
    "intervals.csv",
    "manifest.json",
    "timing.json",
    "run_00",
];
const PER_RUN: [&str; 7] = [
    "agent_aware.ckpt",
    "agent_baseline.ckpt",
    "detector.ckpt",
    "detector_metrics.csv",
    "episodes_aware.csv",
    "episodes_baseline.csv",
    "security.csv",
];

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

/// Every file except the wall-clock summary, keyed by relative path.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/");
                if rel != "timing.json" {
                    out.insert(rel, fs::read(&p).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn smallest_run_writes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    let cfg = cycle4(tmp.path());
    let summary = run_experiment(&cfg).unwrap();
    let mut expected: Vec<String> = TOP_LEVEL.iter().map(|s| s.to_string()).collect();
    expected.sort();
    assert_eq!(listing(tmp.path()), expected);
    assert_eq!(listing(&tmp.path().join("run_00")), PER_RUN.to_vec());

    let logs = read_episode_csv(&tmp.path().join("run_00/episodes_aware.csv")).unwrap();
    assert_eq!(logs.len(), 10);
    assert!(logs.iter().all(|l| l.millis == 0.0));
    assert_eq!(summary.runs.len(), 1);
    assert_eq!(summary.agents[0].mean.len(), 10);
    assert_eq!(summary.agents[0].intervals.len(), 1);

    let timing: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("timing.json")).unwrap()).unwrap();
    for key in ["ms_per_episode_aware", "ms_per_episode_baseline", "packets_per_second"] {
        assert!(timing[key].as_f64().unwrap() >= 0.0, "{key}");
    }
}

#[test]
fn rerun_is_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run_experiment(&cycle4(a.path())).unwrap();
    run_experiment(&cycle4(b.path())).unwrap();
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert_eq!(sa.keys().filter(|k| k.ends_with(".csv")).count(), 8);
    // The manifest echoes the output directory, which differs here.
    let without_manifest = |s: &BTreeMap<String, Vec<u8>>| {
        s.iter().filter(|(k, _)| *k != "manifest.json").map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>()
    };
    assert_eq!(without_manifest(&sa), without_manifest(&sb));

    let c = TempDir::new().unwrap();
    let mut other = cycle4(c.path());
    other.seed += 1;
    run_experiment(&other).unwrap();
    assert_ne!(snapshot(c.path())["run_00/episodes_aware.csv"], sa["run_00/episodes_aware.csv"]);
}

#[test]
fn manifest_describes_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = cycle4(tmp.path());
    run_experiment(&cfg).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["runs"][0]["run"], cfg.seed);
    assert_eq!(manifest["runs"][0]["aware_agent"], cfg.seed * 16 + 3);
    let files = manifest["files"].as_object().unwrap();
    for (rel, bytes) in snapshot(tmp.path()) {
        if rel == "manifest.json" {
            continue;
        }
        assert_eq!(files[&rel], hex::encode(Sha256::digest(&bytes)), "{rel}");
    }
    assert!(!files.contains_key("timing.json"));

    // The echoed config reproduces the run.
    let echoed: ExperimentConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(echoed, cfg);
    let again = TempDir::new().unwrap();
    let mut rerun = echoed;
    rerun.output = again.path().to_path_buf();
    run_experiment(&rerun).unwrap();
    for (rel, hash) in files {
        let bytes = fs::read(again.path().join(rel)).unwrap();
        assert_eq!(hash.as_str().unwrap(), hex::encode(Sha256::digest(&bytes)), "{rel}");
    }
}

#[test]
fn report_rebuilds_aggregates() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = cycle4(tmp.path());
    cfg.runs = 2;
    cfg.episodes = 25;
    cfg.interval = 10;
    cfg.smooth_window = 4;
    let summary = run_experiment(&cfg).unwrap();
    let rebuilt = report(tmp.path(), 4, 10).unwrap();
    assert_eq!(rebuilt, summary.agents);
    assert_eq!(rebuilt[0].intervals.len(), 3);
    let text = fs::read_to_string(tmp.path().join("aggregate_baseline.csv")).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(text.starts_with("episode,mean_reward,smoothed\n"));
}

#[test]
fn config_round_trip_and_validation() {
    let cfg = ExperimentConfig::load(&fixture("net20.toml")).unwrap();
    assert_eq!((cfg.runs, cfg.episodes, cfg.interval, cfg.smooth_window), (10, 10_000, 2500, 100));
    assert_eq!(cfg.attacked_nodes, vec![1, 13, 18]);
    assert!(matches!(cfg.traffic, TrafficSource::Synthetic(_)));
    assert!(cfg.topology.ends_with("net20.topo") && cfg.topology.is_absolute());
    let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(again, cfg);

    let base = fs::read_to_string(fixture("cycle4.toml")).unwrap();
    for (from, to) in [("runs = 1", "runs = 0"), ("episodes = 10", "episodes = 0"), ("seed = 7", "seed = -1")] {
        let bad = base.replace(from, to);
        assert_eq!(ExperimentConfig::from_toml(&bad).unwrap_err().exit_code(), 1, "{to}");
    }
    let typo = format!("{base}\nepisodez = 3\n");
    assert!(ExperimentConfig::from_toml(&typo).is_err());
}

#[test]
fn csv_traffic_source() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("traffic.csv");
    // Export a run's synthetic traffic, then feed it back as the source.
    let synthetic = cycle4(tmp.path());
    let topo = netres::tables::load_topology(&synthetic.topology).unwrap();
    let recs = netres::pipeline::observed_traffic(&synthetic, &topo, 5).unwrap();
    netres::traffic_csv::export_csv(&csv, &recs, &synthetic.detector.classes).unwrap();

    let mut cfg = synthetic;
    cfg.traffic = TrafficSource::Csv { path: csv, schema: Default::default() };
    cfg.output = tmp.path().join("out");
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!(summary.runs[0].weights.len(), 4);
}
