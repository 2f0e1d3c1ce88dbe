//! End-to-end tests of the binary: documents, exit codes, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lowcond::graph::UndirectedGraph;
use lowcond::oracle::{generate_faithful_model, sample, DataMatrix};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowcond"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lowcond-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn analyze_worked_example() {
    let out = run(&["analyze", fixture("example5.edges").to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["so"], 2);
    assert_eq!(doc["d"], 3);
    assert_eq!(doc["d2"], 3);
    assert_eq!(doc["pairs"].as_array().unwrap().len(), 4);
    assert_eq!(doc["witness"]["a"], "2");
    assert_eq!(doc["witness"]["b"], "5");
}

#[test]
fn analyze_complete_graph_reports_infinite() {
    let out = run(&["analyze", fixture("k5.edges").to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["so"], "infinite");
    assert!(doc["witness"].is_null());
}

#[test]
fn analyze_star_fixture() {
    let out = run(&["analyze", fixture("star.edges").to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["so"], 1);
    assert_eq!(doc["d"], 3);
    assert_eq!(doc["d2"], 1);
}

#[test]
fn analyze_rejects_malformed_input_with_exit_2() {
    let out = run(&["analyze", fixture("malformed.edges").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
}

#[test]
fn analyze_rejects_loop_edges_with_exit_2() {
    let out = run(&["analyze", fixture("loop.edges").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ksequence_on_worked_example() {
    let out = run(&["ksequence", fixture("example5.edges").to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["first_recovery_k"], 2);
    assert_eq!(doc["nesting"], "pass");
    assert_eq!(doc["so"], 2);
    assert_eq!(doc["per_k"].as_array().unwrap().len(), 4);
}

#[test]
fn ksequence_nesting_holds_on_a_seeded_random_graph() {
    let g = lowcond::graph::enumerate::erdos_renyi(8, 0.45, 2024);
    let path = scratch("random8.edges");
    std::fs::write(&path, g.to_edge_list()).unwrap();
    let out = run(&["ksequence", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["nesting"], "pass");
    assert!(doc["first_recovery_k"].is_number());
}

#[test]
fn ksequence_on_edgeless_graph_recovers_at_zero() {
    let out = run(&["ksequence", fixture("empty4.edges").to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["first_recovery_k"], 0);
    for e in doc["per_k"].as_array().unwrap() {
        assert_eq!(e["edge_count"], 0);
    }
}

#[test]
fn simulate_population_recovers_exactly() {
    let out = run(&[
        "simulate", "--vertices", "6", "--edge-prob", "0.4", "--seed", "7",
    ]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["population"]["hamming_distance"], 0);
    assert!(doc["statistical"].is_null());
    assert!(doc["population"]["query_count"].as_u64().unwrap() > 0);
}

#[test]
fn simulate_with_samples_adds_statistical_section() {
    let out = run(&[
        "simulate", "--vertices", "6", "--edge-prob", "0.4", "--seed", "7",
        "--samples", "5000",
    ]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["population"]["hamming_distance"], 0);
    assert!(doc["statistical"]["hamming_distance"].is_number());
}

#[test]
fn simulate_edge_prob_zero_is_honest_about_stopping() {
    let out = run(&[
        "simulate", "--vertices", "5", "--edge-prob", "0", "--seed", "3",
    ]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["population"]["hamming_distance"], 0);
    // the edgeless graph certifies at the first order
    assert_eq!(doc["population"]["stopped_at"], 1);
}

#[test]
fn simulate_rejects_too_few_vertices() {
    let out = run(&["simulate", "--vertices", "2", "--edge-prob", "0.4", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_bit_reproducible() {
    let args = [
        "simulate", "--vertices", "6", "--edge-prob", "0.5", "--seed", "11",
        "--samples", "400",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

/// Writes a CSV drawn from a seeded faithful model for a 4-vertex path.
fn path_csv(n: usize, seed: u64) -> (PathBuf, UndirectedGraph) {
    let labels = vec!["a", "b", "c", "d"];
    let truth = UndirectedGraph::new(labels, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let model = generate_faithful_model(&truth, (0.2, 0.8), seed).unwrap();
    let data = sample(&model, n, seed + 1).unwrap();
    let matrix = DataMatrix::new(truth.labels().to_vec(), data).unwrap();
    let path = scratch(&format!("path-{seed}.csv"));
    std::fs::write(&path, matrix.to_csv_string()).unwrap();
    (path, truth)
}

#[test]
fn learn_recovers_a_path_from_csv() {
    let (csv, truth) = path_csv(10_000, 21);
    let out = run(&["learn", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    let result = &doc["report"]["result"];
    let edges = result["edges"].as_array().unwrap();
    assert_eq!(edges.len(), truth.edge_count());
    for pair in [("a", "b"), ("b", "c"), ("c", "d")] {
        assert!(
            edges.iter().any(|e| e[0] == pair.0 && e[1] == pair.1),
            "missing edge {pair:?} in {edges:?}"
        );
    }
}

#[test]
fn learn_neighbors_only_mode_recovers_the_same_path() {
    let (csv, truth) = path_csv(10_000, 21);
    let out = run(&["learn", csv.to_str().unwrap(), "--neighbors-only"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    let edges = doc["report"]["result"]["edges"].as_array().unwrap();
    assert_eq!(edges.len(), truth.edge_count());
}

#[test]
fn learn_two_independent_columns_yields_no_edge() {
    // two independent noise columns via an edgeless model
    let truth = UndirectedGraph::new(vec!["u", "w"], &[]).unwrap();
    let model = generate_faithful_model(&truth, (0.2, 0.8), 5).unwrap();
    let data = sample(&model, 2000, 6).unwrap();
    let matrix = DataMatrix::new(truth.labels().to_vec(), data).unwrap();
    let csv = scratch("pair.csv");
    std::fs::write(&csv, matrix.to_csv_string()).unwrap();

    let out = run(&["learn", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["report"]["sequence"]["entries"][0]["k"], 0);
    assert_eq!(doc["report"]["result"]["edges"].as_array().unwrap().len(), 0);
    assert!(!doc["report"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn learn_single_column_is_an_input_error() {
    let csv = scratch("one.csv");
    std::fs::write(&csv, "x\n1.0\n2.0\n3.0\n").unwrap();
    let out = run(&["learn", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn learn_constant_column_is_named_in_the_error() {
    let csv = scratch("constant.csv");
    let mut text = String::from("x,y,z\n");
    for i in 0..50 {
        text.push_str(&format!("{}.0,7,{}.5\n", i, 50 - i));
    }
    std::fs::write(&csv, text).unwrap();
    let out = run(&["learn", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("\"y\""), "stderr: {stderr}");
}

#[test]
fn learn_insufficient_samples_is_an_input_error() {
    let (csv, _) = path_csv(5, 33);
    let out = run(&["learn", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("insufficient samples"), "stderr: {stderr}");
}

#[test]
fn verify_small_suite_passes() {
    let out = run(&["verify", "--vertices", "3", "--trials", "5", "--seed", "1"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["verdict"], "pass");
    assert_eq!(doc["graphs_checked"], 2 + 8 + 5);
}

#[test]
fn verify_injected_fault_fails_with_counterexample() {
    let out = run(&[
        "verify", "--vertices", "3", "--trials", "0", "--seed", "1", "--inject-fault",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let doc = json_of(&out);
    assert_eq!(doc["verdict"], "fail");
    let violations = doc["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    let dump = violations[0]["graph"].as_str().unwrap();
    UndirectedGraph::parse(dump).expect("counterexample dump is valid edge-list input");
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let path = scratch("analysis.json");
    let out = run(&[
        "analyze", fixture("example5.edges").to_str().unwrap(),
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["so"], 2);
}

#[test]
fn text_format_renders_key_lines() {
    let out = run(&[
        "analyze", fixture("example5.edges").to_str().unwrap(), "--format", "text",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("so: 2"));
    assert!(text.contains("witness: 2 5 separator: 3 4"));
}
