//! Conditional-independence oracles.
//!
//! An oracle answers "are variables `a` and `b` independent given the
//! set `s`?" for a fixed vertex domain. Three backends are provided:
//!
//! - [`GraphOracle`]: simulates a perfectly Markov distribution from a
//!   known graph, answering a query by graph separation;
//! - [`PopulationOracle`]: exact Gaussian backend, answering by a zero
//!   test on population partial correlations of a [`GaussianModel`];
//! - [`FisherZOracle`]: finite-sample backend over a data matrix, using
//!   the Fisher z transform of empirical partial correlations.
//!
//! All oracles are deterministic, symmetric in the pair, and safe to
//! query from several threads; each keeps an atomic tally of the queries
//! answered so far.

mod fisher;
mod gaussian;

pub use fisher::{fisher_z_statistic, DataMatrix, FisherZOracle};
pub use gaussian::{
    generate_faithful_model, generate_faithful_model_with, partial_correlation, sample,
    GaussianModel, GenerateOptions, PopulationOracle,
};

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::graph::{UndirectedGraph, VertexSet};

/// A pairwise conditional-independence query source.
///
/// `query(a, b, s)` returns `true` when the variables at `a` and `b` are
/// independent given the variables in `s`. Implementations must be
/// deterministic and symmetric in `(a, b)`.
pub trait CiOracle: Sync {
    /// Number of variables in the oracle's domain.
    fn vertex_count(&self) -> usize;

    /// Variable labels, in index order.
    fn labels(&self) -> &[String];

    /// Is the variable at `a` independent of the one at `b` given `s`?
    fn query(&self, a: usize, b: usize, s: &VertexSet) -> Result<bool>;

    /// Total queries answered so far.
    fn query_count(&self) -> u64;
}

/// Validates a pairwise query: distinct endpoints, in range, not conditioned on.
pub(crate) fn check_query(n: usize, a: usize, b: usize, s: &VertexSet) -> Result<()> {
    if a >= n || b >= n {
        return Err(Error::UnknownVertex(format!("index {}", a.max(b))));
    }
    if a == b {
        return Err(Error::Domain("query needs two distinct variables".into()));
    }
    if s.contains(&a) || s.contains(&b) {
        return Err(Error::Domain(
            "conditioning set may not contain either query variable".into(),
        ));
    }
    if let Some(&v) = s.iter().find(|&&v| v >= n) {
        return Err(Error::UnknownVertex(format!("index {v}")));
    }
    Ok(())
}

/// Thresholds for the Gaussian oracles.
#[derive(Debug, Clone)]
pub struct TestConfig {
    /// Population zero threshold on |partial correlation|.
    pub epsilon: f64,
    /// Two-sided level of the Fisher z test.
    pub significance: f64,
    /// Sample size used by data-generating front ends.
    pub sample_size: usize,
}

impl TestConfig {
    pub fn new(epsilon: f64, significance: f64, sample_size: usize) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::Domain("epsilon must be non-negative".into()));
        }
        if !(significance > 0.0 && significance < 1.0) {
            return Err(Error::Domain("significance must lie strictly in (0, 1)".into()));
        }
        if sample_size == 0 {
            return Err(Error::Domain("sample size must be positive".into()));
        }
        Ok(Self { epsilon, significance, sample_size })
    }
}

impl Default for TestConfig {
    fn default() -> Self {
        Self { epsilon: 1e-9, significance: 0.05, sample_size: 1000 }
    }
}

/// Exact oracle for a known graph: a query is true exactly when the
/// conditioning set separates the pair. By construction this oracle is
/// perfectly Markov to its graph.
pub struct GraphOracle {
    graph: UndirectedGraph,
    count: AtomicU64,
}

impl GraphOracle {
    pub fn new(graph: UndirectedGraph) -> Self {
        Self { graph, count: AtomicU64::new(0) }
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    /// Set-level query for Markov-property tests: is every variable of
    /// `a` independent of every variable of `b` given `s`, i.e. does `s`
    /// separate `a` from `b` in the graph?
    pub fn query_sets(&self, a: &VertexSet, b: &VertexSet, s: &VertexSet) -> Result<bool> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.graph.separates(a, b, s)
    }
}

impl CiOracle for GraphOracle {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn labels(&self) -> &[String] {
        self.graph.labels()
    }

    fn query(&self, a: usize, b: usize, s: &VertexSet) -> Result<bool> {
        check_query(self.vertex_count(), a, b, s)?;
        self.count.fetch_add(1, Ordering::Relaxed);
        let one = |v| VertexSet::from([v]);
        self.graph.separates(&one(a), &one(b), s)
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}
