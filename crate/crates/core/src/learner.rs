//! Builds the nested sequence of k-graphs over a conditional-independence
//! oracle and stops when the degree-two rule certifies recovery.
//!
//! The order-k graph keeps an edge between two variables unless some
//! conditioning set of size exactly k makes them independent. Under a
//! perfectly Markov oracle the sequence is nested from order 1 on and
//! becomes stationary at the separability order of the true graph; the
//! first order k whose graph has degree two at most k is then a
//! certificate that the graph has been recovered.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{UndirectedGraph, VertexSet};
use crate::oracle::CiOracle;
use crate::separators::degree_two;
use crate::subsets::combinations;

/// Controls for the learner.
#[derive(Debug, Clone)]
pub struct LearnOptions {
    /// Largest conditioning order to try; `None` means `|V| - 2`.
    pub max_k: Option<usize>,
    /// Abort with a partial report once this many oracle queries have
    /// been spent.
    pub max_queries: u64,
    /// Restrict candidate conditioning sets for a pair to the union of
    /// its neighborhoods in the previously built graph. Off by default:
    /// the exact construction quantifies over all subsets; this is a
    /// query-saving mode for the statistical pipeline.
    pub neighbors_only: bool,
}

impl Default for LearnOptions {
    fn default() -> Self {
        Self { max_k: None, max_queries: 10_000_000, neighbors_only: false }
    }
}

/// An edge ruled out while building one k-graph, with the witnessing
/// conditioning set. Labels, not indices, so reports are self-contained.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RemovedEdge {
    pub a: String,
    pub b: String,
    pub witness: Vec<String>,
}

/// One graph of the sequence plus build metadata.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct KGraphEntry {
    pub k: usize,
    pub graph: UndirectedGraph,
    pub edge_count: usize,
    pub degree_two: usize,
    pub queries: u64,
    pub removed: Vec<RemovedEdge>,
}

/// The graphs built so far, indexed by conditioning order starting at 0.
#[derive(Debug, Clone, Serialize, Default, PartialEq)]
pub struct KGraphSequence {
    pub entries: Vec<KGraphEntry>,
}

impl KGraphSequence {
    pub fn graph_at(&self, k: usize) -> Option<&UndirectedGraph> {
        self.entries.iter().find(|e| e.k == k).map(|e| &e.graph)
    }
}

/// Outcome of [`learn_with_stopping`]: the sequence, the stopping order
/// (if one was certified), the resulting graph and diagnostics.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LearnReport {
    pub sequence: KGraphSequence,
    pub stopped_at: Option<usize>,
    pub result: Option<UndirectedGraph>,
    /// Degree two of the graph at the stopping order.
    pub certificate: Option<usize>,
    pub query_count: u64,
    pub warnings: Vec<String>,
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self, k: usize) -> Result<()> {
        if self.used >= self.limit {
            return Err(Error::QueryBudget { budget: self.limit, k });
        }
        self.used += 1;
        Ok(())
    }
}

fn build_entry(
    oracle: &dyn CiOracle,
    k: usize,
    sizes_up_to_k: bool,
    restrict_to: Option<&UndirectedGraph>,
    budget: &mut Budget,
) -> Result<KGraphEntry> {
    let n = oracle.vertex_count();
    if n < 2 || k > n - 2 {
        return Err(Error::Domain(format!(
            "conditioning order {k} out of range for {n} variables"
        )));
    }
    let labels = oracle.labels().to_vec();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut removed: Vec<RemovedEdge> = Vec::new();
    let before = budget.used;
    for a in 0..n {
        for b in (a + 1)..n {
            let pool: Vec<usize> = match restrict_to {
                // neighbors-only mode: candidates come from the pair's
                // neighborhoods in the previous graph
                Some(prev) => {
                    let mut candidates: VertexSet = prev.neighbors(a)?.clone();
                    candidates.extend(prev.neighbors(b)?.iter().copied());
                    candidates.remove(&a);
                    candidates.remove(&b);
                    candidates.into_iter().collect()
                }
                None => (0..n).filter(|&v| v != a && v != b).collect(),
            };
            let sizes = if sizes_up_to_k { 0..=k } else { k..=k };
            let mut witness: Option<VertexSet> = None;
            'search: for size in sizes {
                for s in combinations(&pool, size) {
                    budget.spend(k)?;
                    if oracle.query(a, b, &s)? {
                        witness = Some(s);
                        break 'search;
                    }
                }
            }
            match witness {
                Some(s) => removed.push(RemovedEdge {
                    a: labels[a].clone(),
                    b: labels[b].clone(),
                    witness: s.iter().map(|&v| labels[v].clone()).collect(),
                }),
                None => edges.push((a, b)),
            }
        }
    }
    let graph = UndirectedGraph::new(labels, &edges)?;
    let entry = KGraphEntry {
        k,
        edge_count: graph.edge_count(),
        degree_two: degree_two(&graph)?,
        queries: budget.used - before,
        removed,
        graph,
    };
    Ok(entry)
}

/// The order-k graph over `oracle`: an edge is absent exactly when some
/// conditioning set of size `k` (enumerated lexicographically, stopping
/// at the first witness) makes the pair independent.
pub fn build_k_graph(oracle: &dyn CiOracle, k: usize) -> Result<UndirectedGraph> {
    let mut budget = Budget { used: 0, limit: u64::MAX };
    Ok(build_entry(oracle, k, false, None, &mut budget)?.graph)
}

/// Like [`build_k_graph`] but with witness sizes *at most* `k`; equals
/// the intersection of the order-j graphs for j ≤ k.
pub fn build_k_partial_graph(oracle: &dyn CiOracle, k: usize) -> Result<UndirectedGraph> {
    let mut budget = Budget { used: 0, limit: u64::MAX };
    Ok(build_entry(oracle, k, true, None, &mut budget)?.graph)
}

/// Builds the graphs for every order `0..=max_k`.
pub fn k_graph_sequence(oracle: &dyn CiOracle, max_k: usize) -> Result<KGraphSequence> {
    let n = oracle.vertex_count();
    if n < 2 || max_k > n - 2 {
        return Err(Error::Domain(format!(
            "maximum conditioning order {max_k} out of range for {n} variables"
        )));
    }
    let mut budget = Budget { used: 0, limit: u64::MAX };
    let mut entries = Vec::with_capacity(max_k + 1);
    for k in 0..=max_k {
        entries.push(build_entry(oracle, k, false, None, &mut budget)?);
    }
    Ok(KGraphSequence { entries })
}

/// Runs the learner with default options. See [`learn_with_stopping_with`].
pub fn learn_with_stopping(oracle: &dyn CiOracle) -> Result<LearnReport> {
    learn_with_stopping_with(oracle, &LearnOptions::default())
}

/// Builds order-k graphs for k = 1, 2, … and stops at the first k whose
/// graph has degree two at most k; that graph is returned as the result.
///
/// The order-0 graph is built for the report but never consulted by the
/// stopping rule. When no order up to the limit qualifies, the highest
/// graph built is returned uncertified, with a warning. Exhausting the
/// query budget aborts with a partial report and no result.
pub fn learn_with_stopping_with(
    oracle: &dyn CiOracle,
    options: &LearnOptions,
) -> Result<LearnReport> {
    let n = oracle.vertex_count();
    if n < 3 {
        return Err(Error::Domain(format!(
            "the stopping rule needs at least 3 variables, got {n}"
        )));
    }
    let max_k = options.max_k.unwrap_or(n - 2).min(n - 2);
    let mut budget = Budget { used: 0, limit: options.max_queries };
    let mut report = LearnReport {
        sequence: KGraphSequence::default(),
        stopped_at: None,
        result: None,
        certificate: None,
        query_count: 0,
        warnings: Vec::new(),
    };

    for k in 0..=max_k {
        let previous = options
            .neighbors_only
            .then(|| report.sequence.entries.last().map(|e| &e.graph))
            .flatten();
        match build_entry(oracle, k, false, previous, &mut budget) {
            Ok(entry) => {
                let d2 = entry.degree_two;
                let graph = entry.graph.clone();
                report.sequence.entries.push(entry);
                if k >= 1 && d2 <= k {
                    report.stopped_at = Some(k);
                    report.certificate = Some(d2);
                    report.result = Some(graph);
                    break;
                }
            }
            Err(Error::QueryBudget { budget: limit, k }) => {
                report.warnings.push(format!(
                    "query budget of {limit} exhausted while building the order-{k} graph; \
                     report is partial"
                ));
                break;
            }
            Err(other) => return Err(other),
        }
    }

    if report.stopped_at.is_none() && report.warnings.is_empty() {
        report.warnings.push(format!(
            "no order k ≤ {max_k} satisfied the degree-two stopping rule; either the true \
             graph has degree two above {max_k} or the oracle is not perfectly Markov; \
             returning the order-{max_k} graph uncertified"
        ));
        report.result = report.sequence.graph_at(max_k).cloned();
    }
    report.query_count = budget.used;
    Ok(report)
}

/// Number of vertex pairs whose adjacency differs. Both graphs must have
/// the same labelled vertex set.
pub fn structural_hamming_distance(g: &UndirectedGraph, h: &UndirectedGraph) -> Result<usize> {
    if g.labels() != h.labels() {
        return Err(Error::Domain(
            "structural hamming distance needs identical vertex sets".into(),
        ));
    }
    let n = g.vertex_count();
    let mut dist = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if g.is_adjacent(a, b) != h.is_adjacent(a, b) {
                dist += 1;
            }
        }
    }
    Ok(dist)
}

/// True when every edge of `inner` is an edge of `outer`.
pub fn edges_subset(inner: &UndirectedGraph, outer: &UndirectedGraph) -> bool {
    inner
        .edges()
        .into_iter()
        .all(|(u, v)| outer.is_adjacent(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::GraphOracle;
    use crate::separators::{separability_order, SepOrder};
    use crate::testutil::{example_five, star_k13, vs};
    use std::collections::BTreeMap;

    #[test]
    fn k_graph_recovers_example_five_at_its_order() {
        let g = example_five();
        let oracle = GraphOracle::new(g.clone());
        assert_eq!(build_k_graph(&oracle, 2).unwrap(), g);
    }

    #[test]
    fn zero_order_graph_of_connected_graph_is_complete() {
        let g = example_five();
        let oracle = GraphOracle::new(g);
        assert!(build_k_graph(&oracle, 0).unwrap().is_complete());
    }

    #[test]
    fn maximal_order_graph_is_the_concentration_graph() {
        let g = example_five();
        let oracle = GraphOracle::new(g.clone());
        assert_eq!(build_k_graph(&oracle, 3).unwrap(), g);
    }

    #[test]
    fn order_out_of_range() {
        let oracle = GraphOracle::new(example_five());
        assert!(build_k_graph(&oracle, 4).is_err());
    }

    #[test]
    fn partial_graph_equals_k_graph_at_zero() {
        let g = example_five();
        let oracle = GraphOracle::new(g);
        assert_eq!(
            build_k_partial_graph(&oracle, 0).unwrap(),
            build_k_graph(&oracle, 0).unwrap()
        );
    }

    #[test]
    fn partial_graph_matches_k_graph_under_markov_oracle() {
        let g = example_five();
        let oracle = GraphOracle::new(g);
        for k in 1..=3 {
            assert_eq!(
                build_k_partial_graph(&oracle, k).unwrap(),
                build_k_graph(&oracle, k).unwrap(),
                "at order {k}"
            );
        }
    }

    /// Hand-built lookup oracle; any query not listed is "dependent".
    struct TableOracle {
        labels: Vec<String>,
        independent: BTreeMap<(usize, usize), Vec<VertexSet>>,
        count: std::sync::atomic::AtomicU64,
    }

    impl CiOracle for TableOracle {
        fn vertex_count(&self) -> usize {
            self.labels.len()
        }
        fn labels(&self) -> &[String] {
            &self.labels
        }
        fn query(&self, a: usize, b: usize, s: &VertexSet) -> crate::error::Result<bool> {
            self.count.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            let key = (a.min(b), a.max(b));
            Ok(self
                .independent
                .get(&key)
                .is_some_and(|sets| sets.contains(s)))
        }
        fn query_count(&self) -> u64 {
            self.count.load(std::sync::atomic::Ordering::Relaxed)
        }
    }

    #[test]
    fn non_markov_oracle_separates_partial_from_exact_order() {
        // pair (0,1) independent given {2} but NOT given any size-2 set:
        // the order-2 graph keeps the edge, the partial graph drops it.
        let oracle = TableOracle {
            labels: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            independent: BTreeMap::from([((0, 1), vec![vs(&[2])])]),
            count: Default::default(),
        };
        let exact2 = build_k_graph(&oracle, 2).unwrap();
        let partial2 = build_k_partial_graph(&oracle, 2).unwrap();
        assert!(exact2.is_adjacent(0, 1));
        assert!(!partial2.is_adjacent(0, 1));
        assert!(edges_subset(&partial2, &exact2));
        assert_ne!(exact2, partial2);
    }

    #[test]
    fn sequence_for_example_five_is_nested() {
        let g = example_five();
        let oracle = GraphOracle::new(g.clone());
        let seq = k_graph_sequence(&oracle, 3).unwrap();
        assert_eq!(seq.entries.len(), 4);
        assert!(seq.entries[0].graph.is_complete());
        assert_eq!(seq.entries[2].graph, g);
        assert_eq!(seq.entries[3].graph, g);
        for k in 1..=3usize {
            for j in 1..=k {
                assert!(edges_subset(
                    seq.graph_at(k).unwrap(),
                    seq.graph_at(j).unwrap()
                ));
            }
        }
    }

    #[test]
    fn sequence_on_edgeless_and_complete_oracles() {
        let empty = UndirectedGraph::empty(4);
        let seq = k_graph_sequence(&GraphOracle::new(empty), 2).unwrap();
        assert!(seq.entries.iter().all(|e| e.graph.is_edgeless()));

        let complete = UndirectedGraph::complete(4);
        let seq = k_graph_sequence(&GraphOracle::new(complete), 2).unwrap();
        assert!(seq.entries.iter().all(|e| e.graph.is_complete()));
    }

    #[test]
    fn stopping_on_example_five_certifies_at_three() {
        let g = example_five();
        let report = learn_with_stopping(&GraphOracle::new(g.clone())).unwrap();
        // degree two stays 3 from order 1 on, so the first qualifying k is 3
        assert_eq!(report.stopped_at, Some(3));
        assert_eq!(report.certificate, Some(3));
        assert_eq!(report.result.unwrap(), g);
        assert_eq!(report.sequence.graph_at(2).unwrap(), &g);
    }

    #[test]
    fn stopping_on_star_certifies_at_one() {
        let g = star_k13();
        let report = learn_with_stopping(&GraphOracle::new(g.clone())).unwrap();
        assert_eq!(report.stopped_at, Some(1));
        assert_eq!(report.certificate, Some(1));
        assert_eq!(report.result.unwrap(), g);
    }

    #[test]
    fn stopping_on_complete_graph_takes_warning_path() {
        let g = UndirectedGraph::complete(4);
        let report = learn_with_stopping(&GraphOracle::new(g.clone())).unwrap();
        assert_eq!(report.stopped_at, None);
        assert!(report.result.unwrap().is_complete());
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn stopping_needs_three_vertices() {
        let g = UndirectedGraph::empty(2);
        assert!(learn_with_stopping(&GraphOracle::new(g)).is_err());
    }

    #[test]
    fn stopping_certificate_chain_holds() {
        let g = example_five();
        let report = learn_with_stopping(&GraphOracle::new(g)).unwrap();
        let k = report.stopped_at.unwrap();
        let result = report.result.as_ref().unwrap();
        let d2 = degree_two(result).unwrap();
        assert!(d2 <= k);
        match separability_order(result) {
            SepOrder::Finite(so) => assert!(so <= d2),
            SepOrder::Infinite => panic!("result should not be complete"),
        }
    }

    #[test]
    fn neighbors_only_mode_still_recovers_under_exact_oracle() {
        // true neighborhoods contain a minimal separator for every pair,
        // and learned neighborhoods only ever overshoot them
        let g = example_five();
        let report = learn_with_stopping_with(
            &GraphOracle::new(g.clone()),
            &LearnOptions { neighbors_only: true, ..LearnOptions::default() },
        )
        .unwrap();
        assert_eq!(report.result.unwrap(), g);
        let unrestricted = learn_with_stopping(&GraphOracle::new(g)).unwrap();
        assert!(report.query_count <= unrestricted.query_count);
    }

    #[test]
    fn budget_aborts_with_partial_report() {
        let g = example_five();
        let report = learn_with_stopping_with(
            &GraphOracle::new(g),
            &LearnOptions { max_queries: 12, ..LearnOptions::default() },
        )
        .unwrap();
        assert!(report.result.is_none());
        assert!(report.stopped_at.is_none());
        assert_eq!(report.query_count, 12);
        assert!(report.warnings.iter().any(|w| w.contains("budget")));
    }

    #[test]
    fn learn_report_is_deterministic_including_query_count() {
        let g = example_five();
        let a = learn_with_stopping(&GraphOracle::new(g.clone())).unwrap();
        let b = learn_with_stopping(&GraphOracle::new(g)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn hamming_distance() {
        let g = example_five();
        assert_eq!(structural_hamming_distance(&g, &g).unwrap(), 0);

        let k3 = UndirectedGraph::complete(3);
        let e3 = UndirectedGraph::empty(3);
        assert_eq!(structural_hamming_distance(&k3, &e3).unwrap(), 3);

        let minus = g.with_edges(&[(0, 1), (1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(structural_hamming_distance(&g, &minus).unwrap(), 1);

        let other = UndirectedGraph::empty(4);
        assert!(structural_hamming_distance(&g, &other).is_err());
    }
}
