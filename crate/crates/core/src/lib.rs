//! Determine a concentration graph by low-order conditioning.
//!
//! A concentration graph ties a random vector to an undirected graph: a
//! missing edge between two variables means they are conditionally
//! independent given all the others. When the distribution is perfectly
//! Markov to its graph (independence holds exactly for separated sets),
//! the whole graph can be recovered while conditioning on far fewer
//! variables than "all the others". This crate implements that program:
//!
//! - [`graph`]: immutable undirected graphs, the plain and covariance
//!   separation criteria, and an edge-list text format;
//! - [`separators`]: minimal separators, minimum vertex cuts and the
//!   structural parameters (separability order, degree, degree two);
//! - [`oracle`]: conditional-independence oracles: exact ones simulated
//!   from a known graph, and Gaussian ones backed by seeded faithful
//!   precision matrices, in population or finite-sample (Fisher z) form;
//! - [`learner`]: the nested sequence of k-graphs over an oracle and the
//!   degree-two stopping rule that certifies recovery;
//! - [`verify`]: the property suites that check every structural claim on
//!   exhaustive small graphs and seeded random ones.
//!
//! ```
//! use lowcond::graph::UndirectedGraph;
//! use lowcond::learner::learn_with_stopping;
//! use lowcond::oracle::GraphOracle;
//!
//! let g = UndirectedGraph::parse("vertices: 1 2 3 4 5\n1 2\n2 3\n2 4\n3 4\n3 5\n4 5").unwrap();
//! let report = learn_with_stopping(&GraphOracle::new(g.clone())).unwrap();
//! assert_eq!(report.result.as_ref(), Some(&g));
//! ```

pub mod error;
pub mod graph;
pub mod guide;
pub mod learner;
pub mod oracle;
pub mod separators;
mod subsets;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use graph::{UndirectedGraph, VertexSet};
pub use separators::{SepOrder, SeparabilityReport};
