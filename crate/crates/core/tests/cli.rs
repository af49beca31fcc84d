use std::fs;
use std::path::Path;
use std::process::Command;

use likedness::cli::{run_args, RunManifest};
use serde_json::Value;

fn run(args: &[&str]) -> likedness::Result<String> {
    let mut out = Vec::new();
    run_args(std::iter::once("likedness").chain(args.iter().copied()), &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_k2(dir: &Path) -> (String, String) {
    let graph = dir.join("k2.txt");
    let rates = dir.join("k2.csv");
    fs::write(&graph, "# nodes: 2\n0 1\n").unwrap();
    fs::write(&rates, "i,j,rate\n0,1,0.75\n1,0,1.25\n").unwrap();
    (path(&graph).into(), path(&rates).into())
}

#[test]
fn generate_writes_graph_and_manifest_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ba.txt");
    let msg = run(&["generate", "--m0", "5", "--t", "95", "--seed", "3", "--output", path(&out)]).unwrap();
    assert!(msg.contains("100 vertices, 485 edges"), "{msg}");
    let first = fs::read(&out).unwrap();

    let manifest = RunManifest::read(&dir.path().join("ba.txt.manifest.json")).unwrap();
    assert_eq!(manifest.subcommand, "generate");
    assert_eq!(manifest.master_seed, Some(3));

    run(&["generate", "--m0", "5", "--t", "95", "--seed", "3", "--output", path(&out)]).unwrap();
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn generate_rejects_more_edges_than_seed_vertices() {
    let err = run(&["generate", "--m0", "5", "--t", "10", "--m", "6", "--seed", "1"]).unwrap_err();
    assert!(err.to_string().contains("m (6) must not exceed m0 (5)"), "{err}");
}

#[test]
fn solve_reports_two_node_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, rates) = write_k2(dir.path());
    let text = run(&["solve", "--graph", &graph, "--rates", &rates]).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    let l: Vec<f64> = serde_json::from_value(report["likedness"].clone()).unwrap();
    assert!((l[0] - 0.75).abs() < 1e-12 && (l[1] - 1.25).abs() < 1e-12, "{l:?}");
    assert!(report["product"].is_null());
}

#[test]
fn solve_with_product_truncation_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, rates) = write_k2(dir.path());
    let out = dir.path().join("solve.json");
    run(&["solve", "--graph", &graph, "--rates", &rates, "--product-n", "50", "--output", path(&out)])
        .unwrap();
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["product"]["truncation"], 50);
    assert!(dir.path().join("solve.json.manifest.json").exists());
}

#[test]
fn solve_names_an_off_edge_rate() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("p3.txt");
    let rates = dir.path().join("p3.csv");
    fs::write(&graph, "0 1\n1 2\n").unwrap();
    fs::write(&rates, "i,j,rate\n0,1,1\n1,0,1\n1,2,1\n2,1,1\n0,2,1\n").unwrap();
    let err = run(&["solve", "--graph", path(&graph), "--rates", path(&rates)]).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("(0, 2)"), "{msg}");
}

#[test]
fn simulate_fit_and_replay_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let msg = run(&[
        "simulate", "--m0", "5", "--t", "95", "--ensembles", "300", "--seed", "1", "--no-ensembles",
        "--out-dir", path(&out),
    ])
    .unwrap();
    assert!(msg.contains("300 ensembles accepted"), "{msg}");
    assert!(!out.join("ensembles.csv").exists());

    let nodes = out.join("nodes.csv");
    let text = run(&[
        "fit", "--input", path(&nodes), "--x", "betweenness", "--y", "mean_desirability",
        "--drop-nonpositive",
    ])
    .unwrap();
    let fit: Value = serde_json::from_str(&text).unwrap();
    assert!(fit["fit"]["exponent"].as_f64().unwrap() < 0.0);

    let curve = out.join("neighbor_curve.csv");
    let text = run(&[
        "fit", "--input", path(&curve), "--x", "mean_desirability", "--y",
        "mean_neighbor_desirability", "--family", "exponential",
    ])
    .unwrap();
    let fit: Value = serde_json::from_str(&text).unwrap();
    assert!(fit["fit"]["exponent"].as_f64().unwrap() < 0.0);

    let aggregate = fs::read(out.join("aggregate.json")).unwrap();
    fs::remove_file(out.join("aggregate.json")).unwrap();
    run(&["replay", path(&out.join("manifest.json"))]).unwrap();
    assert_eq!(fs::read(out.join("aggregate.json")).unwrap(), aggregate);
}

#[test]
fn simulate_rejects_zero_ensembles() {
    let dir = tempfile::tempdir().unwrap();
    let err = run(&["simulate", "--ensembles", "0", "--seed", "1", "--out-dir", path(dir.path())])
        .unwrap_err();
    assert!(err.to_string().contains("ensemble"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_likedness");
    let ok = Command::new(bin)
        .args(["generate", "--m0", "3", "--t", "4", "--seed", "9"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().contains("# nodes: 7"));

    let bad = Command::new(bin)
        .args(["generate", "--m0", "3", "--t", "4", "--m", "4", "--seed", "9"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stderr).unwrap().starts_with("error:"));
}
