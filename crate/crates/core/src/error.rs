//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by graph construction, separator queries, oracles and the learner.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed edge-list input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A loop edge (same endpoint twice) was supplied.
    #[error("loop edge rejected at line {line}: vertex {label:?} joined to itself")]
    Loop { line: usize, label: String },

    /// A vertex label or index that the graph does not contain.
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),

    /// A precondition on the arguments was violated.
    #[error("{0}")]
    Domain(String),

    /// Numerical failure (singular or badly conditioned matrix).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The faithfulness audit rejected every candidate model.
    #[error(
        "model generation failed after {attempts} attempts: pair ({a}, {b}) given {set:?} \
         kept a partial correlation below the audit threshold"
    )]
    Generation {
        attempts: usize,
        a: String,
        b: String,
        set: Vec<String>,
    },

    /// Too few samples for the requested conditioning order.
    #[error("insufficient samples for conditioning order: n = {n} but |S| = {order} requires n > {}", order + 3)]
    InsufficientSamples { n: usize, order: usize },

    /// A data column with (numerically) zero variance.
    #[error("degenerate column {0:?}: variance is zero")]
    DegenerateColumn(String),

    /// Malformed CSV input.
    #[error("csv error: {0}")]
    Csv(String),

    /// The learner's query budget was exhausted.
    #[error("query budget of {budget} exhausted while building the order-{k} graph")]
    QueryBudget { budget: u64, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
