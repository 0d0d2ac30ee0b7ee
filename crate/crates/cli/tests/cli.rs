use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hgricci::{run_flow, Hypergraph};
use hgricci_cli::bench::{SweepRow, TimingRow};
use hgricci_cli::bundle::ResultBundle;
use hgricci_cli::io::{format_hypergraph, parse_hypergraph, read_hypergraph, read_labels};
use proptest::prelude::*;
use tempfile::TempDir;

fn hgricci(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgricci")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn toy_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = hgricci(&["generate", "toy", "--a", "6", "--b", "4", "--out", "toy.hg"], dir.path());
    assert!(o.status.success());
    dir
}

#[test]
fn toy_recovered_by_nmi_threshold() {
    let dir = toy_dir();
    let args = [
        "cluster", "--input", "toy.hg", "--labels", "toy.labels", "--method", "edge", "--weighting", "uniform",
        "--agg", "max", "--tau", "auto-nmi", "--out", "r.json",
    ];
    let o = hgricci(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("NMI: 1.0\n"));
    let e = hgricci(&["eval", "--pred", "r.json", "--labels", "toy.labels"], dir.path());
    assert_eq!(stdout(&e).trim(), "1.0");
}

#[test]
fn toy_fixed_threshold_gives_four_components() {
    let dir = toy_dir();
    let args = ["cluster", "--input", "toy.hg", "--method", "edge", "--weighting", "uniform", "--tau", "1.5", "--out", "r.json"];
    let o = hgricci(&args, dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("communities: 4\n"));
    let bundle = ResultBundle::read(&dir.path().join("r.json")).unwrap();
    assert_eq!(bundle.tau, 1.5);
    assert_eq!(bundle.scores.num_communities, 4);
}

#[test]
fn echoed_config_reproduces_the_weights() {
    let dir = toy_dir();
    let args = ["cluster", "--input", "toy.hg", "--method", "node", "--iters", "3", "--alpha", "0.25", "--out", "r.json"];
    assert!(hgricci(&args, dir.path()).status.success());
    let bundle = ResultBundle::read(&dir.path().join("r.json")).unwrap();
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert_eq!(ResultBundle::from_json(&text).unwrap(), bundle);
    let parsed = read_hypergraph(&dir.path().join("toy.hg")).unwrap();
    let again = run_flow(&parsed.hypergraph, &bundle.config.flow_config()).unwrap();
    assert_eq!(again.hyperedge_weights, bundle.weights);
}

#[test]
fn eval_of_identical_labels_is_one() {
    let dir = toy_dir();
    let args = ["cluster", "--input", "toy.hg", "--tau", "1.5", "--weighting", "uniform", "--out", "r.json"];
    assert!(hgricci(&args, dir.path()).status.success());
    let bundle = ResultBundle::read(&dir.path().join("r.json")).unwrap();
    let pred: String = bundle.nodes.iter().zip(&bundle.labels).map(|(n, l)| format!("{n} c{l}\n")).collect();
    std::fs::write(dir.path().join("pred.labels"), pred).unwrap();
    let o = hgricci(&["eval", "--pred", "r.json", "--labels", "pred.labels"], dir.path());
    assert_eq!(stdout(&o).trim(), "1.0");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = toy_dir();
    let code = |args: &[&str]| hgricci(args, dir.path()).status.code();
    assert_eq!(code(&["cluster", "--input", "toy.hg", "--tau", "auto-nmi", "--out", "r.json"]), Some(2));
    assert_eq!(code(&["cluster", "--input", "missing.hg", "--out", "r.json"]), Some(2));
    assert_eq!(code(&["cluster", "--input", "toy.hg", "--solver", "simplex", "--out", "r.json"]), Some(2));
    assert_eq!(code(&["cluster", "--input", "toy.hg", "--iters", "0", "--out", "r.json"]), Some(2));
    assert_eq!(code(&["cluster", "--input", "toy.hg", "--unknown"]), Some(2));
    std::fs::write(dir.path().join("bad.hg"), "a b # w=x\n").unwrap();
    assert_eq!(code(&["cluster", "--input", "bad.hg", "--out", "r.json"]), Some(2));
    std::fs::write(dir.path().join("empty.hg"), "").unwrap();
    assert_eq!(code(&["cluster", "--input", "empty.hg", "--out", "r.json"]), Some(2));
    assert_eq!(code(&["generate", "toy", "--a", "2", "--b", "4", "--out", "t.hg"]), Some(2));
}

#[test]
fn hsbm_generation_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |out: &str, seed: &str| {
        let args = [
            "generate", "hsbm", "--n", "40", "--k", "2", "--s-in", "3", "--s-out", "4", "--n-in", "10", "--n-out",
            "5", "--seed", seed, "--per-community", "--out", out,
        ];
        assert!(hgricci(&args, dir.path()).status.success());
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = gen("a.hg", "3");
    assert_eq!(a, gen("b.hg", "3"));
    assert_ne!(a, gen("c.hg", "4"));
    assert_eq!(a.lines().count(), 25);
    let labels = read_labels(&dir.path().join("a.labels")).unwrap();
    assert_eq!(labels.entries.len(), 40);
}

#[test]
fn bench_commands_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.json"),
        r#"{"n": 20, "k": 2, "n_in": 15, "n_in_per_community": true, "cells": [[2, 3]], "n_out": [0, 2],
            "repetitions": 2, "methods": ["edge"], "flow": {"iters": 2}}"#,
    )
    .unwrap();
    let o = hgricci(&["bench", "sweep", "--spec", "sweep.json", "--out", "sweep.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<SweepRow> = hgricci_cli::bench::read_csv(std::fs::File::open(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);

    std::fs::write(dir.path().join("timing.json"), r#"{"ks": [2, 3], "n": 30, "m": 12, "repetitions": 2}"#).unwrap();
    let o = hgricci(&["bench", "timing", "--spec", "timing.json", "--out", "timing.csv"], dir.path());
    assert!(o.status.success());
    let rows: Vec<TimingRow> = hgricci_cli::bench::read_csv(std::fs::File::open(dir.path().join("timing.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(stdout(&o).contains("node/edge ratio"));

    std::fs::write(dir.path().join("empty.json"), r#"{"ks": []}"#).unwrap();
    let o = hgricci(&["bench", "timing", "--spec", "empty.json", "--out", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zoo_fixture_loads() {
    let p = read_hypergraph(&fixture("zoo.hg")).unwrap();
    assert_eq!(p.hypergraph.num_nodes(), 101);
    assert_eq!(p.hypergraph.num_edges(), 42);
    assert_eq!(p.dropped_lines, 1);
    let labels = read_labels(&fixture("zoo.labels")).unwrap().align(&p.tokens).unwrap();
    assert_eq!(labels.iter().max(), Some(&6));
}

fn hypergraph() -> impl Strategy<Value = Hypergraph> {
    (2usize..15).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::btree_set(0..n, 2..=n.min(5)), 0u8..4), 1..12).prop_map(move |edges| {
            let weights = edges.iter().map(|e| if e.1 == 0 { 1.0 } else { 1.0 / e.1 as f64 + 0.1 }).collect();
            let edges = edges.into_iter().map(|e| e.0.into_iter().collect()).collect();
            Hypergraph::with_weights(n, edges, weights).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn format_parse_round_trip(h in hypergraph()) {
        let tokens: Vec<String> = (0..h.num_nodes()).map(|v| format!("v{v}")).collect();
        let p = parse_hypergraph(&format_hypergraph(&h, &tokens)).unwrap();
        prop_assert_eq!(p.hypergraph.weights(), h.weights());
        for (e, edge) in p.hypergraph.edges().iter().enumerate() {
            let mut names: Vec<&str> = edge.iter().map(|&v| p.tokens[v].as_str()).collect();
            names.sort_unstable();
            let mut expect: Vec<&str> = h.edge(e).iter().map(|&v| tokens[v].as_str()).collect();
            expect.sort_unstable();
            prop_assert_eq!(names, expect);
        }
    }
}
