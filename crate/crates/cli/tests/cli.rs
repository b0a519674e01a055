use std::path::Path;
use std::process::Command;

use entraj_cli::{simulate, write_outputs, ModelParams, RunManifest, RunResult};
use entraj_core::dynamics::EventCounts;
use entraj_core::ensemble::{EnsembleOutput, EnsembleStats, StatsOptions};
use serde_json::Value;

fn entraj(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_entraj"))
        .args(args)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn small(model: ModelParams, particles: usize) -> RunManifest {
    let mut m = RunManifest::with_defaults(model);
    m.particles = particles;
    m.stored_trajectories = 3;
    m
}

#[test]
fn exit_codes() {
    assert_eq!(entraj(&["--help"]).status.code(), Some(0));
    assert_eq!(entraj(&["double-slit", "--nope"]).status.code(), Some(1));
    assert_eq!(
        entraj(&["double-slit", "--sigma0", "-1"]).status.code(),
        Some(1)
    );
    let missing = entraj(&["replay", "/nonexistent/manifest.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn empty_run_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small(ModelParams::double_slit_defaults(), 1);
    let experiment = manifest.experiment().unwrap();
    let stats = EnsembleStats::compute(
        &[],
        &experiment,
        manifest.screen_x,
        &StatsOptions::default(),
    );
    let run = RunResult {
        manifest,
        experiment,
        output: EnsembleOutput {
            trajectories: vec![],
            records: vec![],
            failures: vec![],
            events: EventCounts::default(),
        },
        stats,
        spin_map: None,
        v_max: 1.0,
        store_stride: None,
    };
    write_outputs(dir.path(), &run).unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.path().join("screen.csv")).unwrap(),
        "particle_id,t_hit,hit\n"
    );
    assert_eq!(
        std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap(),
        "particle_id,step,t,x,transverse\n"
    );
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["n_hits"], 0);
    assert!(summary["ks"].is_null() && summary["l1"].is_null());
}

#[test]
fn written_numbers_read_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = small(ModelParams::stern_gerlach_defaults(), 40);
    manifest.eta = 0.5;
    let run = simulate(&manifest, None).unwrap();
    write_outputs(dir.path(), &run).unwrap();

    let screen = std::fs::read_to_string(dir.path().join("screen.csv")).unwrap();
    let rows: Vec<&str> = screen.lines().skip(1).collect();
    assert_eq!(rows.len(), run.output.records.len());
    for (row, rec) in rows.iter().zip(&run.output.records) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), rec.particle_id);
        assert_eq!(f[1].parse::<f64>().unwrap().to_bits(), rec.t_hit.to_bits());
        assert_eq!(
            f[2].parse::<f64>().unwrap().to_bits(),
            rec.transverse_hit.to_bits()
        );
    }

    let summary = read_json(&dir.path().join("summary.json"));
    let ks = summary["ks"].as_f64().unwrap();
    assert_eq!(ks.to_bits(), run.stats.ks_statistic.unwrap().to_bits());
    let up = summary["up_fraction"].as_f64().unwrap();
    assert_eq!(up.to_bits(), run.stats.up_fraction.unwrap().to_bits());
    assert!(summary["events"]["clamps"].is_u64());

    let back: RunManifest =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(back, manifest);

    let traj = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert!(traj.starts_with("particle_id,step,t,x,transverse,theta,tilt\n"));
    let ids: std::collections::BTreeSet<&str> = traj
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ids.len(), 3);
    assert!(dir.path().join("spinfield.csv").exists());
}

#[test]
fn default_double_slit_histogram_holds_every_particle() {
    let dir = tempfile::tempdir().unwrap();
    let out = entraj(&[
        "double-slit",
        "--particles",
        "150",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let hist = read_json(&dir.path().join("histogram.json"));
    let total: u64 = hist["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(total, 150);
    assert_eq!(hist["counts"].as_array().unwrap().len(), 64);
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["dt"].as_f64().unwrap(), 1e-11);
    assert!(summary["manifest"].get("timestamp").is_none());
    assert!(read_json(&dir.path().join("manifest.json"))["timestamp"].is_u64());
}
