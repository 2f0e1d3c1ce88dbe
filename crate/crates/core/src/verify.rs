//! Property suites over exhaustive small graphs and seeded random ones.
//!
//! Every structural claim the library relies on is checked here as an
//! executable property: order bounds, the component decomposition,
//! uniform-size separators, exact recovery of the graph at its
//! separability order, nesting of the k-graph sequence, the k-partial
//! identity, single-vertex covariance separation, the stopping rule, and
//! agreement of the max-flow cut size with brute-force enumeration.
//! Violations carry the offending graph as edge-list text, so a failure
//! is reproducible with one command.

use serde::Serialize;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::graph::enumerate::{all_labeled_graphs, erdos_renyi};
use crate::graph::{UndirectedGraph, VertexSet};
use crate::learner::{
    build_k_graph, build_k_partial_graph, edges_subset, learn_with_stopping, LearnReport,
};
use crate::oracle::{CiOracle, GraphOracle};
use crate::separators::{
    degree, degree_two, is_minimal_separator, is_separator, min_separator_size, min_vertex_cut,
    separability_order, SepOrder, SeparabilityReport,
};
use crate::subsets::combinations;

/// What the suite runs on: exhaustive labelled graphs up to a small
/// vertex count, plus seeded random graphs at a larger one.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Exhaust all labelled graphs for every vertex count `2..=this`
    /// (internally capped at 6).
    pub exhaustive_max_vertices: usize,
    /// Number of seeded random graphs.
    pub random_trials: usize,
    /// Vertex count of the random graphs.
    pub random_vertices: usize,
    pub seed: u64,
    /// Corrupt one oracle answer per graph; the suite must then fail.
    pub inject_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            exhaustive_max_vertices: 6,
            random_trials: 200,
            random_vertices: 8,
            seed: 0,
            inject_fault: false,
        }
    }
}

/// Hard cap on the exhaustive sweep; beyond this the count explodes.
pub const EXHAUSTIVE_VERTEX_CAP: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
    /// Edge-list text of the offending graph, valid as command input.
    pub graph: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    /// Graphs on which the check's precondition held.
    pub applied: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub graphs_checked: usize,
    pub checks: Vec<CheckSummary>,
    /// First violations found, up to a reporting cap; counts above are
    /// still accurate in `checks`.
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0)
    }
}

const VIOLATION_REPORT_CAP: usize = 25;

/// Names of every check, in execution order.
pub const ALL_CHECKS: &[&str] = &[
    "order-zero-characterization",
    "order-decomposes-over-components",
    "witness-separator-attains-order",
    "every-pair-has-order-size-separator",
    "order-at-most-degree",
    "degree-two-edge-monotone",
    "order-at-most-degree-two",
    "exact-recovery-at-order",
    "sequence-nesting",
    "k-partial-equals-k-graph",
    "single-vertex-covariance-separation",
    "zero-one-graph-identity",
    "stopping-rule-recovery",
    "min-cut-matches-enumeration",
];

/// Runs every check in [`ALL_CHECKS`] over the configured graphs.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    run_checks(config, ALL_CHECKS)
}

/// Runs a subset of the checks, by name, over the configured graphs.
pub fn run_checks(config: &SuiteConfig, names: &[&str]) -> SuiteReport {
    let selected: Vec<&'static str> = ALL_CHECKS
        .iter()
        .copied()
        .filter(|n| names.contains(n))
        .collect();
    let mut summaries: Vec<CheckSummary> = selected
        .iter()
        .map(|n| CheckSummary { name: n.to_string(), applied: 0, violations: 0 })
        .collect();
    let mut violations: Vec<Violation> = Vec::new();
    let mut graphs_checked = 0usize;

    let needs = Needs::for_checks(&selected);
    let mut run_graph = |g: &UndirectedGraph| {
        graphs_checked += 1;
        let facts = Facts::compute(g, &needs, config.inject_fault);
        for (i, name) in selected.iter().enumerate() {
            let mut details = Vec::new();
            let applied = run_check(name, g, &facts, &mut details);
            if applied {
                summaries[i].applied += 1;
            }
            summaries[i].violations += details.len();
            for detail in details {
                if violations.len() < VIOLATION_REPORT_CAP {
                    violations.push(Violation {
                        check: name.to_string(),
                        detail,
                        graph: g.to_edge_list(),
                    });
                }
            }
        }
    };

    for n in 2..=config.exhaustive_max_vertices.min(EXHAUSTIVE_VERTEX_CAP) {
        for g in all_labeled_graphs(n) {
            run_graph(&g);
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_trials {
        let p = rng.random_range(0.15..0.85);
        let sub_seed: u64 = rng.random();
        let g = erdos_renyi(config.random_vertices.max(2), p, sub_seed);
        run_graph(&g);
    }

    SuiteReport { graphs_checked, checks: summaries, violations }
}

/// Which expensive per-graph artifacts the selected checks require.
struct Needs {
    report: bool,
    kgraphs: bool,
    kpartials: bool,
    learn: bool,
}

impl Needs {
    fn for_checks(names: &[&'static str]) -> Self {
        let has = |n: &str| names.contains(&n);
        Needs {
            report: has("witness-separator-attains-order"),
            kgraphs: has("exact-recovery-at-order")
                || has("sequence-nesting")
                || has("k-partial-equals-k-graph")
                || has("zero-one-graph-identity")
                || has("stopping-rule-recovery"),
            kpartials: has("k-partial-equals-k-graph"),
            learn: has("stopping-rule-recovery"),
        }
    }
}

/// Per-graph artifacts shared by the checks.
struct Facts {
    so: SepOrder,
    d: usize,
    d2: usize,
    report: Option<SeparabilityReport>,
    /// k-graphs for k = 0..=n-2 over the (possibly faulty) exact oracle.
    kgraphs: Vec<UndirectedGraph>,
    kpartials: Vec<UndirectedGraph>,
    learn: Option<LearnReport>,
}

impl Facts {
    fn compute(g: &UndirectedGraph, needs: &Needs, inject_fault: bool) -> Self {
        let n = g.vertex_count();
        let make_oracle = || -> Box<dyn CiOracle> {
            let inner = GraphOracle::new(g.clone());
            if inject_fault {
                Box::new(FlipFirstAnswer::new(inner))
            } else {
                Box::new(inner)
            }
        };
        let kgraphs = if needs.kgraphs && n >= 2 {
            let oracle = make_oracle();
            (0..=n - 2)
                .map(|k| build_k_graph(oracle.as_ref(), k).expect("order in range"))
                .collect()
        } else {
            Vec::new()
        };
        let kpartials = if needs.kpartials && n >= 2 {
            let oracle = make_oracle();
            (0..=n - 2)
                .map(|k| build_k_partial_graph(oracle.as_ref(), k).expect("order in range"))
                .collect()
        } else {
            Vec::new()
        };
        let learn = if needs.learn && n >= 3 {
            let oracle = make_oracle();
            Some(learn_with_stopping(oracle.as_ref()).expect("at least 3 vertices"))
        } else {
            None
        };
        Facts {
            so: separability_order(g),
            d: degree(g).expect("non-empty graph"),
            d2: degree_two(g).expect("non-empty graph"),
            report: needs.report.then(|| SeparabilityReport::compute(g).expect("non-empty")),
            kgraphs,
            kpartials,
            learn,
        }
    }
}

/// Dispatches one named check; returns whether its precondition applied.
fn run_check(name: &str, g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    match name {
        "order-zero-characterization" => check_order_zero(g, facts, out),
        "order-decomposes-over-components" => check_component_decomposition(g, facts, out),
        "witness-separator-attains-order" => check_witness(g, facts, out),
        "every-pair-has-order-size-separator" => check_uniform_size(g, facts, out),
        "order-at-most-degree" => check_order_vs_degree(g, facts, out),
        "degree-two-edge-monotone" => check_degree_two_monotone(g, facts, out),
        "order-at-most-degree-two" => check_order_vs_degree_two(g, facts, out),
        "exact-recovery-at-order" => check_exact_recovery(g, facts, out),
        "sequence-nesting" => check_nesting(g, facts, out),
        "k-partial-equals-k-graph" => check_k_partial(g, facts, out),
        "single-vertex-covariance-separation" => check_single_vertex_covariance(g, facts, out),
        "zero-one-graph-identity" => check_zero_one(g, facts, out),
        "stopping-rule-recovery" => check_stopping(g, facts, out),
        "min-cut-matches-enumeration" => check_brute_force(g, facts, out),
        other => panic!("unknown check {other:?}"),
    }
}

fn non_adjacent_pairs(g: &UndirectedGraph) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if !g.is_adjacent(a, b) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Order zero exactly when every component is complete or a singleton.
fn check_order_zero(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    let trivial = g.connected_components().iter().all(|c| {
        let sub = g.induced_subgraph(c).expect("component is in range");
        sub.is_complete()
    });
    if (m == 0) != trivial {
        out.push(format!(
            "order {m} but components {} all complete-or-singleton",
            if trivial { "ARE" } else { "are NOT" }
        ));
    }
    true
}

/// For positive order, the order equals the maximum over the orders of
/// the non-complete components.
fn check_component_decomposition(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if m == 0 {
        return false;
    }
    let mut component_max = 0usize;
    for c in g.connected_components() {
        let sub = g.induced_subgraph(&c).expect("component in range");
        if let SepOrder::Finite(s) = separability_order(&sub) {
            component_max = component_max.max(s);
        }
    }
    if component_max != m {
        out.push(format!("order {m} but component maximum {component_max}"));
    }
    true
}

/// The report's witness pair carries a minimal separator of size exactly
/// the separability order.
fn check_witness(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if m == 0 {
        return false;
    }
    let report = facts.report.as_ref().expect("requested by Needs");
    let Some(w) = &report.witness else {
        out.push("order positive but no witness pair".into());
        return true;
    };
    let a = g.index_of(&w.a).expect("witness label");
    let b = g.index_of(&w.b).expect("witness label");
    let sep: VertexSet = w
        .separator
        .iter()
        .map(|l| g.index_of(l).expect("witness label"))
        .collect();
    if sep.len() != m {
        out.push(format!("witness separator has size {}, order is {m}", sep.len()));
    }
    match is_minimal_separator(g, a, b, &sep) {
        Ok(true) => {}
        Ok(false) => out.push(format!("witness separator {sep:?} is not minimal")),
        Err(e) => out.push(format!("witness check failed: {e}")),
    }
    true
}

/// With positive order m, every non-adjacent pair admits a separator of
/// size exactly m (a minimum cut padded with further vertices).
fn check_uniform_size(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if m == 0 {
        return false;
    }
    for (a, b) in non_adjacent_pairs(g) {
        let mut sep = min_vertex_cut(g, a, b).expect("non-adjacent");
        for v in 0..g.vertex_count() {
            if sep.len() >= m {
                break;
            }
            if v != a && v != b {
                sep.insert(v);
            }
        }
        if sep.len() != m || !is_separator(g, a, b, &sep).expect("valid arguments") {
            out.push(format!(
                "pair ({a}, {b}) admits no padded separator of size {m}"
            ));
        }
    }
    true
}

fn check_order_vs_degree(_g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if m > facts.d {
        out.push(format!("order {m} exceeds degree {}", facts.d));
    }
    true
}

/// Adding any single edge can only grow degree two.
fn check_degree_two_monotone(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    for (a, b) in non_adjacent_pairs(g) {
        let mut edges = g.edges();
        edges.push((a, b));
        let bigger = g.with_edges(&edges).expect("valid edges");
        let d2 = degree_two(&bigger).expect("non-empty");
        if d2 < facts.d2 {
            out.push(format!(
                "adding edge ({a}, {b}) dropped degree two from {} to {d2}",
                facts.d2
            ));
        }
    }
    true
}

fn check_order_vs_degree_two(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    if !g.is_connected() || g.is_complete() {
        return false;
    }
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if m > facts.d2 {
        out.push(format!("order {m} exceeds degree two {}", facts.d2));
    }
    true
}

/// Connected non-complete graphs are recovered exactly at their order.
fn check_exact_recovery(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    if !g.is_connected() || g.is_complete() {
        return false;
    }
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if m == 0 {
        return false; // connected non-complete graphs have positive order
    }
    if facts.kgraphs[m] != *g {
        out.push(format!("order-{m} graph differs from the true graph"));
    }
    true
}

/// E_k ⊆ E_j for 1 ≤ j ≤ k, and the true edges sit inside every level.
fn check_nesting(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let levels = &facts.kgraphs;
    for k in 1..levels.len() {
        for j in 1..=k {
            if !edges_subset(&levels[k], &levels[j]) {
                out.push(format!("order-{k} edges not inside order-{j} edges"));
            }
        }
    }
    for (k, level) in levels.iter().enumerate() {
        if !edges_subset(g, level) {
            out.push(format!("true edges not inside the order-{k} graph"));
        }
    }
    true
}

/// The at-most-k graph equals the exactly-k graph under a perfectly
/// Markov oracle, and always equals the intersection of levels 0..=k.
fn check_k_partial(_g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let levels = &facts.kgraphs;
    let partials = &facts.kpartials;
    for k in 1..levels.len() {
        if partials[k] != levels[k] {
            out.push(format!("at-most-{k} graph differs from the order-{k} graph"));
        }
    }
    for k in 0..partials.len() {
        let mut intersection = levels[0].edges();
        for level in &levels[1..=k] {
            intersection.retain(|&(u, v)| level.is_adjacent(u, v));
        }
        let expected = levels[0].with_edges(&intersection).expect("subset of edges");
        if partials[k] != expected {
            out.push(format!(
                "at-most-{k} graph is not the intersection of levels 0..={k}"
            ));
        }
    }
    true
}

/// Whenever the order is below |V| − 2, every non-adjacent pair admits a
/// single vertex whose covariance-criterion conditioning separates it.
fn check_single_vertex_covariance(
    g: &UndirectedGraph,
    facts: &Facts,
    out: &mut Vec<String>,
) -> bool {
    let n = g.vertex_count();
    let SepOrder::Finite(m) = facts.so else {
        return false;
    };
    if n < 3 || m >= n - 2 {
        return false;
    }
    for (a, b) in non_adjacent_pairs(g) {
        let found = (0..n).filter(|&v| v != a && v != b).any(|gamma| {
            g.covariance_separates(
                &VertexSet::from([a]),
                &VertexSet::from([b]),
                &VertexSet::from([gamma]),
            )
            .expect("valid arguments")
        });
        if !found {
            out.push(format!(
                "pair ({a}, {b}) has no single-vertex covariance separator"
            ));
        }
    }
    true
}

/// The edge intersection of levels 0 and 1 is exactly level 1.
fn check_zero_one(_g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let levels = &facts.kgraphs;
    if levels.len() < 2 {
        return false;
    }
    let both: Vec<(usize, usize)> = levels[1]
        .edges()
        .into_iter()
        .filter(|&(u, v)| levels[0].is_adjacent(u, v))
        .collect();
    if both.len() != levels[1].edge_count() {
        out.push("some order-1 edge is missing from the order-0 graph".into());
    }
    true
}

/// The stopping rule returns the true graph whenever its degree two fits
/// below |V| − 2, and the certified order dominates both structural
/// parameters; complete graphs take the warning path.
fn check_stopping(g: &UndirectedGraph, facts: &Facts, out: &mut Vec<String>) -> bool {
    let n = g.vertex_count();
    if n < 3 {
        return false;
    }
    let report = facts.learn.as_ref().expect("requested by Needs");
    if g.is_complete() {
        if report.stopped_at.is_some() {
            out.push("complete graph stopped with a certificate".into());
        }
        if report.warnings.is_empty() {
            out.push("complete graph produced no warning".into());
        }
        if report.result.as_ref() != Some(g) {
            out.push("complete graph not returned as the uncertified result".into());
        }
        return true;
    }
    if facts.d2 <= n - 2 {
        match (report.stopped_at, &report.result) {
            (Some(k), Some(result)) => {
                if result != g {
                    out.push(format!("stopped at {k} with a wrong graph"));
                }
                let d2_at_k = degree_two(result).expect("non-empty");
                if d2_at_k > k {
                    out.push(format!("certificate violated: degree two {d2_at_k} > k = {k}"));
                }
                if let SepOrder::Finite(so) = facts.so {
                    if !(so <= facts.d2 && facts.d2 <= d2_at_k && d2_at_k <= k) {
                        out.push(format!(
                            "parameter chain broken: so {so}, d2 {}, d2(G_k) {d2_at_k}, k {k}",
                            facts.d2
                        ));
                    }
                }
                // the stop must be the first qualifying order
                for j in 1..k {
                    let d2_j = degree_two(&facts.kgraphs[j]).expect("non-empty");
                    if d2_j <= j {
                        out.push(format!("order {j} already qualified but stop was {k}"));
                    }
                }
            }
            _ => out.push("no certified stop although degree two fits".into()),
        }
    } else {
        // uncertified path: the exact oracle still reproduces the graph
        if report.stopped_at.is_none() {
            if report.warnings.is_empty() {
                out.push("uncertified path produced no warning".into());
            }
            if report.result.as_ref() != Some(g) {
                out.push("uncertified result differs from the true graph".into());
            }
        } else if report.result.as_ref() != Some(g) {
            out.push("stop certified but result differs from the true graph".into());
        }
    }
    true
}

/// Max-flow minimum cut sizes agree with exhaustive subset enumeration.
fn check_brute_force(g: &UndirectedGraph, _facts: &Facts, out: &mut Vec<String>) -> bool {
    let n = g.vertex_count();
    for (a, b) in non_adjacent_pairs(g) {
        let flow = min_separator_size(g, a, b).expect("non-adjacent");
        let pool: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
        let mut brute = None;
        'sizes: for size in 0..=pool.len() {
            for s in combinations(&pool, size) {
                let sep = g
                    .separates(&VertexSet::from([a]), &VertexSet::from([b]), &s)
                    .expect("valid arguments");
                if sep {
                    brute = Some(size);
                    break 'sizes;
                }
            }
        }
        let brute = brute.expect("the full complement separates any non-adjacent pair");
        if flow != brute {
            out.push(format!(
                "pair ({a}, {b}): max-flow size {flow}, brute-force size {brute}"
            ));
        }
    }
    true
}

/// Oracle wrapper that inverts the answer to the first query; used to
/// prove the suite can fail.
struct FlipFirstAnswer {
    inner: GraphOracle,
    answered: AtomicU64,
}

impl FlipFirstAnswer {
    fn new(inner: GraphOracle) -> Self {
        Self { inner, answered: AtomicU64::new(0) }
    }
}

impl CiOracle for FlipFirstAnswer {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }
    fn labels(&self) -> &[String] {
        self.inner.labels()
    }
    fn query(&self, a: usize, b: usize, s: &VertexSet) -> crate::error::Result<bool> {
        let answer = self.inner.query(a, b, s)?;
        let index = self.answered.fetch_add(1, Ordering::Relaxed);
        Ok(if index == 0 { !answer } else { answer })
    }
    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }
}
