//! Behavioural tests of the binary: exit codes, seed handling, output
//! routing and artifact formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_recolor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("recolor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn enumerate_reports_counts_and_echoes_the_seed() {
    let out = run(&["enumerate", "--family", "cycle", "--n", "6", "--k", "3", "--seed", "4"]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["result"]["counts"]["all"], 66);
    assert_eq!(v["result"]["counts"]["frozen"], 6);
    assert_eq!(v["result"]["ratio_exact"], "6/66");
}

#[test]
fn missing_seed_is_drawn_and_echoed() {
    let out = run(&["enumerate", "--family", "cycle", "--n", "4"]);
    assert!(out.status.success());
    assert!(report(&out)["config"]["seed"].is_u64());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let out = bin()
        .env("RECOLOR_SEED", "314")
        .args(["enumerate", "--family", "cycle", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(report(&out)["config"]["seed"], 314);
}

#[test]
fn exceeding_the_node_budget_flags_the_report_and_exit_code() {
    let out = run(&["enumerate", "--family", "petersen", "--budget-nodes", "50", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert!(v["result"]["partial"].as_str().unwrap().contains("node budget"));
    let verdicts = v["verdicts"].as_array().unwrap();
    assert!(verdicts
        .iter()
        .any(|x| x["name"] == "within_budget" && x["satisfied"] == false));
}

#[test]
fn invalid_input_exits_with_two() {
    let out = run(&["enumerate", "--family", "moebius", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown family"));
}

#[test]
fn lowerbound_mixing_refuses_small_levels() {
    let out = run(&["mixing", "--lowerbound", "--k-level", "2", "--delta", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k-level ≥ 5"));
}

#[test]
fn exact_mixing_emits_a_csv_series() {
    let path = tmp("profile.csv");
    let out = run(&[
        "mixing",
        "--exact",
        "--family",
        "path",
        "--n",
        "2",
        "--k",
        "3",
        "--seed",
        "1",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,d"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,0.8333333333333"), "{first}");
    // the report still lands on stdout
    assert_eq!(report(&out)["result"]["t_mix_quarter"], 6);
}

#[test]
fn csv_without_output_file_is_rejected() {
    let out = run(&[
        "mixing", "--exact", "--family", "path", "--n", "2", "--seed", "1", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_emits_loadable_graph_text_with_provenance() {
    let out = run(&["construct", "--family", "j", "--l", "2", "--delta", "3", "--seed", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# {"));
    assert!(header.contains("\"seed\":6"));
    let g = recolor_core::Graph::from_text(&text).unwrap();
    assert_eq!((g.n(), g.m()), (8, 12));
}

#[test]
fn construct_with_output_writes_the_file_and_reports() {
    let path = tmp("j23.txt");
    let out = run(&[
        "construct",
        "--family",
        "j",
        "--l",
        "2",
        "--delta",
        "3",
        "--seed",
        "6",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["result"]["n"], 8);
    assert_eq!(v["result"]["regularity"], 3);
    let g = recolor_core::Graph::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g.m(), 12);
}

#[test]
fn random_families_resolve_deterministically_from_the_seed() {
    let a = run(&["construct", "--family", "random-regular", "--n", "12", "--delta", "3", "--seed", "8"]);
    let b = run(&["construct", "--family", "random-regular", "--n", "12", "--delta", "3", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["construct", "--family", "random-regular", "--n", "12", "--delta", "3", "--seed", "9"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_writes_bound_reports_as_json_lines() {
    let path = tmp("reports.jsonl");
    let out = run(&[
        "verify",
        "--check",
        "peel-step",
        "--family",
        "j",
        "--l",
        "2",
        "--delta",
        "3",
        "--seed",
        "1",
        "--jsonl",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "all max-degree vertices satisfy the step");
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    // J(2,3) is cubic, so every vertex is a valid peeling target
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|r| r["satisfied"] == true));
}

#[test]
fn girth_hunt_emits_a_verified_witness_pair() {
    let prefix = tmp("hunt");
    let out = run(&[
        "girth-hunt",
        "--delta",
        "2",
        "--girth",
        "3",
        "--fibers",
        "3",
        "--seed",
        "5",
        "--emit",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["result"]["found"], true);
    let g = recolor_core::Graph::from_text(
        &std::fs::read_to_string(v["result"]["files"]["graph"].as_str().unwrap()).unwrap(),
    )
    .unwrap();
    let c = recolor_core::Colouring::from_text(
        &std::fs::read_to_string(v["result"]["files"]["colouring"].as_str().unwrap()).unwrap(),
    )
    .unwrap();
    assert!(recolor_core::colouring::is_frozen(&g, &c).unwrap());
}

#[test]
fn recolouring_graph_exports_match_the_report() {
    let edges = tmp("meta-edges.txt");
    let states = tmp("meta-states.json");
    let out = run(&[
        "recolouring-graph",
        "--family",
        "cycle",
        "--n",
        "6",
        "--k",
        "3",
        "--seed",
        "1",
        "--export-edges",
        edges.to_str().unwrap(),
        "--export-states",
        states.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["result"]["states"], 66);
    assert_eq!(v["result"]["isolated"], 6);
    let meta = recolor_core::Graph::from_text(&std::fs::read_to_string(&edges).unwrap()).unwrap();
    assert_eq!(meta.n(), 66);
    assert_eq!(meta.m(), v["result"]["edges"].as_u64().unwrap() as usize);
    let table: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&states).unwrap()).unwrap();
    assert_eq!(table["states"].as_array().unwrap().len(), 66);
}
