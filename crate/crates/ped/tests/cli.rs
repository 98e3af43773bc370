use std::process::{Command, Output};

use pedigree::formats::GraphJson;

fn ped(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ped")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const A: &str = "n:10;idx:1,2,4,2,6,8,8";
const B: &str = "n:10;idx:3,1,3,5,7,8,3";

#[test]
fn graph_of_worked_example() {
    let o = ped(&["graph", "--a", A, "--b", B]);
    assert!(o.status.success());
    let g: GraphJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g.vertices, vec![4, 5, 7, 8, 9, 10]);
    assert!(g.connected);
    assert_eq!(g.edges.len(), 7);
}

#[test]
fn identical_pedigrees_are_a_domain_error() {
    let o = ped(&["adjacent", "--a", A, "--b", A]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("identical pedigree"));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(ped(&["graph", "--a", "n:10;idx:1,2", "--b", B]).status.code(), Some(1));
    assert_eq!(ped(&["graph", "--a", A, "--b", "n:5;idx:1,1"]).status.code(), Some(1));
    assert_eq!(ped(&["graph", "--a", A, "--b", B, "--frobnicate"]).status.code(), Some(1));
    assert_eq!(ped(&["census", "--n", "9"]).status.code(), Some(1));
    let o = ped(&["example", "--out", "/nonexistent-dir/x.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn pair_form_is_accepted() {
    let a: pedigree_core::Pedigree = A.parse().unwrap();
    let o = ped(&["adjacent", "--a", &a.to_pair_string(), "--b", B, "--format", "text"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "adjacent");
}

#[test]
fn emitted_pedigrees_round_trip() {
    let listed = stdout(&ped(&["enumerate", "--n", "5"]));
    let peds: Vec<&str> = listed.lines().collect();
    assert_eq!(peds.len(), 12);
    for p in &peds[1..] {
        let o = ped(&["adjacent", "--a", peds[0], "--b", p]);
        assert!(o.status.success(), "{p}");
    }
    let sampled = stdout(&ped(&["sample", "--n", "10", "--samples", "3", "--seed", "4"]));
    let s: Vec<&str> = sampled.lines().collect();
    assert_eq!(s.len(), 3);
    let o = ped(&["graph", "--a", s[0], "--b", s[1], "--format", "dot"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("graph pedigree {"));
    let json = stdout(&ped(&["sample", "--n", "10", "--seed", "4", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let one = serde_json::to_string(&v[0]).unwrap();
    assert!(ped(&["graph", "--a", &one, "--b", s[0]]).status.success());
}

#[test]
fn example_narration() {
    let o = ped(&["example"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("time  6") && text.contains("not a vertex"));
    assert!(text.contains("time  8") && text.contains("isolated"));
    assert!(text.contains("final: vertices [4, 5, 7, 8, 9, 10], connected"));
}

#[test]
fn simulate_is_worker_independent() {
    let args = ["simulate", "--alice", "greedy-common", "--n", "30,60", "--samples", "300", "--seed", "5"];
    let a = ped(&[&args[..], &["--workers", "1"]].concat());
    let b = ped(&[&args[..], &["--workers", "4"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(pedigree::harness::CSV_HEADER));
    assert!(lines.next().unwrap().starts_with("greedy-common,30,300,"));
}

#[test]
fn simulate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let json = dir.path().join("out.json");
    std::fs::write(
        &cfg,
        format!("strategy = isolationist\nn_targets = 20\nsamples = 50\nseed = 3\nout_json = {}\n", json.display()),
    )
    .unwrap();
    let o = ped(&["simulate", "--config", cfg.to_str().unwrap(), "--samples", "40"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("isolationist,20,40,"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["targets"]["20"]["samples"], 40);
    std::fs::write(&cfg, "strategy = random\nbogus = 1\n").unwrap();
    assert_eq!(ped(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn verification_subcommands() {
    let o = ped(&["verify-polytope", "--n", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["disagreements"], 0);
    assert_eq!(v["complete"], false);

    let o = ped(&["verify-transitions", "--samples", "20", "--n", "20"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["documented_counterexample"]["observed"], 2);
    assert_eq!(v["documented_counterexample"]["printed_bound"], 0);

    let o = ped(&["verify-attachment", "--samples", "20", "--n", "15"]);
    assert!(o.status.success());
}

#[test]
fn schema_and_play() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&ped(&["schema"]))).unwrap();
    assert!(v["graph"]["required"].as_array().unwrap().iter().any(|x| x == "connected"));
    let o = ped(&["play", "--alice", "isolationist:prefer-c", "--n", "50", "--seed", "2", "--checkpoints", "25,50"]);
    let t: pedigree::formats::TrajectoryJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t.s.len(), 48);
    assert_eq!(t.connected_at.len(), 2);
    assert_eq!(ped(&["schema", "--format", "csv"]).status.code(), Some(1));
}
