use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn netres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netres")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stage(sub: &str, out: &Path, extra: &[&str]) -> Output {
    let config = fixture("cycle4.toml");
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    netres(&args)
}

#[test]
fn single_stage_commands_chain() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path();
    let r = stage("gen-traffic", out, &[]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(fs::read_to_string(out.join("traffic.csv")).unwrap().starts_with("node_id,payload_hex,label,timestamp\n"));

    let r = stage("train-detector", out, &[]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("detector.ckpt").exists() && out.join("detector_metrics.csv").exists());

    let model = out.join("detector.ckpt");
    let traffic = out.join("traffic.csv");
    let r = stage("assess", out, &["--model", model.to_str().unwrap(), "--traffic", traffic.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let from_files = fs::read(out.join("security.csv")).unwrap();

    // Without explicit inputs, assess retrains from the same derived seeds.
    let fresh = tmp.path().join("fresh");
    assert_eq!(code(&stage("assess", &fresh, &[])), 0);
    assert_eq!(fs::read(fresh.join("security.csv")).unwrap(), from_files);

    let security = out.join("security.csv");
    for extra in [vec![], vec!["--baseline"]] {
        let mut args = vec!["--security", security.to_str().unwrap()];
        args.extend(extra.iter().copied());
        let r = stage("train-agent", out, &args);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        assert!(String::from_utf8_lossy(&r.stdout).contains("greedy action"));
    }
    assert!(out.join("episodes_aware.csv").exists() && out.join("episodes_baseline.csv").exists());
    assert!(out.join("agent_aware.ckpt").exists() && out.join("agent_baseline.ckpt").exists());
}

#[test]
fn experiment_then_report() {
    let tmp = TempDir::new().unwrap();
    let r = stage("experiment", tmp.path(), &["--seed", "3"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let r = stage("report", tmp.path(), &[]);
    assert_eq!(code(&r), 0);
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("aware") && text.contains("0-9"), "{text}");
    let manifest = fs::read_to_string(tmp.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 3"));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&netres(&["--help"])), 0);
    assert_eq!(code(&netres(&["fly"])), 1);
    assert_eq!(code(&netres(&["experiment"])), 1);

    let bad_toml = tmp.path().join("bad.toml");
    fs::write(&bad_toml, "runs = [").unwrap();
    assert_eq!(code(&netres(&["experiment", "--config", bad_toml.to_str().unwrap()])), 1);

    let topo = tmp.path().join("high.topo");
    fs::write(&topo, "nodes 2\ncost 0 201\ncost 1 1\nedge 0 1\n").unwrap();
    let cfg = tmp.path().join("high.toml");
    let text = fs::read_to_string(fixture("cycle4.toml")).unwrap().replace("cycle4.topo", "high.topo");
    fs::write(&cfg, text).unwrap();
    let r = netres(&["experiment", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("outside [1, 200]"));

    let missing = tmp.path().join("nope.toml");
    assert_eq!(code(&netres(&["experiment", "--config", missing.to_str().unwrap()])), 2);

    // A directory without runs is not an experiment output.
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&stage("report", &empty, &[])), 1);
}
