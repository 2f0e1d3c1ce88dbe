//! Command-line front end: analyze graph structure, trace k-graph
//! sequences, run seeded experiments, learn graphs from CSV data, and
//! execute the property-verification suite.
//!
//! Exit codes: 0 success, 2 input error, 3 model-generation error,
//! 4 property failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lowcond::graph::enumerate::erdos_renyi;
use lowcond::graph::UndirectedGraph;
use lowcond::learner::{
    k_graph_sequence, learn_with_stopping_with, structural_hamming_distance, LearnOptions,
    LearnReport,
};
use lowcond::oracle::{
    generate_faithful_model, sample, CiOracle, DataMatrix, FisherZOracle, GraphOracle,
    PopulationOracle, TestConfig,
};
use lowcond::separators::{separability_order, SepOrder, SeparabilityReport};
use lowcond::verify::{run_suite, SuiteConfig, SuiteReport};
use lowcond::Error;

const EXIT_INPUT: i32 = 2;
const EXIT_GENERATION: i32 = 3;
const EXIT_PROPERTY: i32 = 4;

#[derive(Parser)]
#[command(
    name = "lowcond",
    version,
    about = "Determine concentration graphs by low-order conditioning",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Structural analysis of an edge-list graph: separability order,
    /// degree, degree two, per-pair orders and a witness separator.
    Analyze(AnalyzeArgs),
    /// Build the k-graph sequence over the exact oracle of a graph and
    /// report nesting and the first exact-recovery order.
    Ksequence(KsequenceArgs),
    /// Seeded end-to-end experiment: random graph, faithful Gaussian
    /// model, learner run, structural Hamming distance.
    Simulate(SimulateArgs),
    /// Learn a concentration graph from CSV data with the Fisher z test.
    Learn(LearnArgs),
    /// Run the property-verification suite on exhaustive small graphs
    /// plus seeded random graphs.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list graph file.
    graph: PathBuf,
}

#[derive(Args)]
struct KsequenceArgs {
    /// Edge-list graph file, treated as ground truth.
    graph: PathBuf,
    /// Largest conditioning order to build (defaults to |V| - 2).
    #[arg(long)]
    max_k: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of variables (at least 3).
    #[arg(long)]
    vertices: usize,
    /// Edge probability of the random graph, in [0, 1].
    #[arg(long)]
    edge_prob: f64,
    /// Seed for graph, model and data generation.
    #[arg(long)]
    seed: u64,
    /// Also run the finite-sample pipeline on this many drawn samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Two-sided level of the Fisher z test.
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Zero threshold for population partial correlations.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
}

#[derive(Args)]
struct LearnArgs {
    /// CSV file: header row of variable names, then one sample per row.
    data: PathBuf,
    /// Two-sided level of the Fisher z test.
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Largest conditioning order to try (defaults to |V| - 2).
    #[arg(long)]
    max_k: Option<usize>,
    /// Restrict conditioning sets for a pair to its neighborhoods in the
    /// previously learned graph (saves queries; the default searches all
    /// subsets).
    #[arg(long)]
    neighbors_only: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Exhaustive sweep covers all labelled graphs on 2..=N vertices
    /// (capped at 6); above 6 this also sets the random-graph size.
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    /// Number of seeded random graphs (on 8 vertices by default).
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corrupt one oracle answer per graph; the suite must then fail.
    #[arg(long)]
    inject_fault: bool,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Generation { .. } => EXIT_GENERATION,
                _ => EXIT_INPUT,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    let (document, text, code) = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args)?,
        Command::Ksequence(args) => cmd_ksequence(&args)?,
        Command::Simulate(args) => cmd_simulate(&args)?,
        Command::Learn(args) => cmd_learn(&args)?,
        Command::Verify(args) => cmd_verify(&args)?,
    };
    let rendered = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&document).expect("serializable document");
            s.push('\n');
            s
        }
        Format::Text => text,
    };
    match cli.output {
        Some(path) => {
            let mut file = std::fs::File::create(&path)
                .map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
            file.write_all(rendered.as_bytes())
                .map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
        }
        None => print!("{rendered}"),
    }
    Ok(code)
}

fn read_graph(path: &PathBuf) -> Result<UndirectedGraph, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    UndirectedGraph::parse(&text)
}

type CommandOutput = (serde_json::Value, String, i32);

fn cmd_analyze(args: &AnalyzeArgs) -> Result<CommandOutput, Error> {
    let graph = read_graph(&args.graph)?;
    let report = SeparabilityReport::compute(&graph)?;
    let text = render_analyze_text(&report);
    Ok((serde_json::to_value(&report).expect("serializable"), text, 0))
}

fn render_analyze_text(report: &SeparabilityReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("so: {}\n", report.so));
    out.push_str(&format!("d: {}\n", report.d));
    out.push_str(&format!("d2: {}\n", report.d2));
    for component in &report.components {
        out.push_str(&format!("component: {}\n", component.join(" ")));
    }
    for pair in &report.pairs {
        out.push_str(&format!("pair {} {}: order {}\n", pair.a, pair.b, pair.order));
    }
    if let Some(w) = &report.witness {
        out.push_str(&format!(
            "witness: {} {} separator: {}\n",
            w.a,
            w.b,
            w.separator.join(" ")
        ));
    }
    out
}

fn cmd_ksequence(args: &KsequenceArgs) -> Result<CommandOutput, Error> {
    let graph = read_graph(&args.graph)?;
    let n = graph.vertex_count();
    if n < 2 {
        return Err(Error::Domain(format!(
            "k-graph sequences need at least 2 vertices, got {n}"
        )));
    }
    let max_k = args.max_k.unwrap_or(n - 2).min(n - 2);
    let oracle = GraphOracle::new(graph.clone());
    let sequence = k_graph_sequence(&oracle, max_k)?;

    let mut nested = true;
    for k in 1..sequence.entries.len() {
        for j in 1..=k {
            if !lowcond::learner::edges_subset(
                &sequence.entries[k].graph,
                &sequence.entries[j].graph,
            ) {
                nested = false;
            }
        }
    }
    let first_recovery_k = sequence.entries.iter().find(|e| e.graph == graph).map(|e| e.k);
    let so = separability_order(&graph);
    // under the exact oracle, recovery can never happen below the order
    let consistent = match (first_recovery_k, so) {
        (Some(k), SepOrder::Finite(m)) => k <= m,
        _ => true,
    };

    let per_k: Vec<serde_json::Value> = sequence
        .entries
        .iter()
        .map(|e| {
            json!({
                "k": e.k,
                "edge_count": e.edge_count,
                "degree_two": e.degree_two,
                "queries": e.queries,
            })
        })
        .collect();
    let document = json!({
        "vertices": n,
        "so": so,
        "per_k": per_k,
        "nesting": if nested { "pass" } else { "fail" },
        "first_recovery_k": first_recovery_k,
    });

    let mut text = format!("vertices: {n}\nso: {so}\n");
    for e in &sequence.entries {
        text.push_str(&format!(
            "k={}: edges {} d2 {} queries {}\n",
            e.k, e.edge_count, e.degree_two, e.queries
        ));
    }
    text.push_str(&format!("nesting: {}\n", if nested { "pass" } else { "fail" }));
    match first_recovery_k {
        Some(k) => text.push_str(&format!("first recovery k: {k}\n")),
        None => text.push_str("first recovery k: none\n"),
    }

    let code = if nested && consistent { 0 } else { EXIT_PROPERTY };
    Ok((document, text, code))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<CommandOutput, Error> {
    if args.vertices < 3 {
        return Err(Error::Domain("simulate needs at least 3 vertices".into()));
    }
    if !(0.0..=1.0).contains(&args.edge_prob) {
        return Err(Error::Domain("edge probability must lie in [0, 1]".into()));
    }
    let truth = erdos_renyi(args.vertices, args.edge_prob, args.seed);
    let model = generate_faithful_model(&truth, (0.2, 0.8), args.seed)?;
    let config = TestConfig::new(args.epsilon, args.significance, args.samples.unwrap_or(1000))?;

    let population_oracle = PopulationOracle::new(model.clone(), &config);
    let population_report = learn_with_stopping_with(&population_oracle, &LearnOptions::default())?;
    let population = summarize_run(&truth, &population_report)?;

    let statistical = match args.samples {
        Some(n) => {
            let data = sample(&model, n, args.seed.wrapping_add(1))?;
            let matrix = DataMatrix::new(truth.labels().to_vec(), data)?;
            let oracle = FisherZOracle::new(&matrix, &config)?;
            let report = learn_with_stopping_with(&oracle, &LearnOptions::default())?;
            Some(summarize_run(&truth, &report)?)
        }
        None => None,
    };

    let document = json!({
        "vertices": args.vertices,
        "edge_prob": args.edge_prob,
        "seed": args.seed,
        "truth": truth,
        "population": population,
        "statistical": statistical,
    });
    let text = render_simulate_text(&document);
    Ok((document, text, 0))
}

fn summarize_run(
    truth: &UndirectedGraph,
    report: &LearnReport,
) -> Result<serde_json::Value, Error> {
    let hamming = match &report.result {
        Some(result) => Some(structural_hamming_distance(truth, result)?),
        None => None,
    };
    Ok(json!({
        "stopped_at": report.stopped_at,
        "certificate": report.certificate,
        "hamming_distance": hamming,
        "query_count": report.query_count,
        "warnings": report.warnings,
        "result": report.result,
    }))
}

fn render_simulate_text(document: &serde_json::Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "vertices: {}\nedge_prob: {}\nseed: {}\n",
        document["vertices"], document["edge_prob"], document["seed"]
    ));
    for section in ["population", "statistical"] {
        let part = &document[section];
        if part.is_null() {
            continue;
        }
        out.push_str(&format!(
            "{section}: stopped_at {} hamming {} queries {}\n",
            part["stopped_at"], part["hamming_distance"], part["query_count"]
        ));
    }
    out
}

fn cmd_learn(args: &LearnArgs) -> Result<CommandOutput, Error> {
    let matrix = DataMatrix::read_csv_path(&args.data)?;
    let p = matrix.variable_count();
    let n = matrix.sample_count();
    if p < 2 {
        return Err(Error::Domain(format!(
            "learning needs at least 2 variables, got {p}"
        )));
    }
    let config = TestConfig::new(1e-9, args.significance, n.max(1))?;
    let oracle = FisherZOracle::new(&matrix, &config)?;

    let report = if p == 2 {
        // No conditioning order in 1..=|V|-2 exists; report the marginal
        // (order-0) graph uncertified.
        if n <= 3 {
            return Err(Error::InsufficientSamples { n, order: 0 });
        }
        let sequence = k_graph_sequence(&oracle, 0)?;
        let result = sequence.graph_at(0).cloned();
        LearnReport {
            sequence,
            stopped_at: None,
            result,
            certificate: None,
            query_count: oracle.query_count(),
            warnings: vec![
                "the stopping rule needs at least 3 variables; returning the order-0 graph"
                    .to_string(),
            ],
        }
    } else {
        let max_k = args.max_k.unwrap_or(p - 2).min(p - 2);
        if n <= max_k + 3 {
            return Err(Error::InsufficientSamples { n, order: max_k });
        }
        learn_with_stopping_with(
            &oracle,
            &LearnOptions {
                max_k: Some(max_k),
                neighbors_only: args.neighbors_only,
                ..LearnOptions::default()
            },
        )?
    };

    let document = json!({
        "samples": n,
        "variables": p,
        "significance": args.significance,
        "report": report,
    });
    let mut text = format!("samples: {n}\nvariables: {p}\n");
    match report.stopped_at {
        Some(k) => text.push_str(&format!("stopped_at: {k}\n")),
        None => text.push_str("stopped_at: none\n"),
    }
    if let Some(result) = &report.result {
        for (u, v) in result.edges() {
            text.push_str(&format!("edge: {} {}\n", result.label_of(u), result.label_of(v)));
        }
    }
    for w in &report.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    Ok((document, text, 0))
}

fn cmd_verify(args: &VerifyArgs) -> Result<CommandOutput, Error> {
    let config = SuiteConfig {
        exhaustive_max_vertices: args.vertices.min(6),
        random_trials: args.trials,
        random_vertices: if args.vertices > 6 { args.vertices } else { 8 },
        seed: args.seed,
        inject_fault: args.inject_fault,
    };
    let report = run_suite(&config);
    let passed = report.passed();
    let document = json!({
        "verdict": if passed { "pass" } else { "fail" },
        "graphs_checked": report.graphs_checked,
        "checks": report.checks,
        "violations": report.violations,
    });
    let text = render_verify_text(&report);
    Ok((document, text, if passed { 0 } else { EXIT_PROPERTY }))
}

fn render_verify_text(report: &SuiteReport) -> String {
    let mut out = format!("graphs checked: {}\n", report.graphs_checked);
    for check in &report.checks {
        out.push_str(&format!(
            "{}: applied {} violations {}\n",
            check.name, check.applied, check.violations
        ));
    }
    for v in &report.violations {
        out.push_str(&format!("violation [{}]: {}\n", v.check, v.detail));
        out.push_str("offending graph:\n");
        out.push_str(&v.graph);
    }
    out.push_str(&format!(
        "verdict: {}\n",
        if report.passed() { "pass" } else { "fail" }
    ));
    out
}
