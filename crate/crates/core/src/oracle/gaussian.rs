//! Gaussian backing for conditional-independence oracles.
//!
//! A [`GaussianModel`] pairs a precision matrix whose support is exactly
//! a given graph with its inverse, the covariance matrix. Models are
//! generated by seeded diagonal dominance and then audited: every
//! conditioning set that does not separate a pair must leave a partial
//! correlation bounded away from zero, so the model is operationally
//! perfectly Markov to its graph at machine precision.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_query, CiOracle, TestConfig};
use crate::error::{Error, Result};
use crate::graph::{UndirectedGraph, VertexSet};
use crate::subsets::combinations;

/// Condition-number guard for submatrix inversion (1-norm estimate).
const CONDITION_LIMIT: f64 = 1e12;

/// A Gaussian distribution whose precision matrix has the support of a
/// known graph.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    omega: DMatrix<f64>,
    sigma: DMatrix<f64>,
    graph: UndirectedGraph,
}

impl GaussianModel {
    /// Precision matrix (inverse covariance).
    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    /// Covariance matrix.
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// The support graph: off-diagonal zeros of the precision matrix are
    /// exactly the missing edges.
    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Checks the structural invariants: symmetric positive-definite
    /// precision, support consistency with the graph, and that the two
    /// matrices invert each other to 1e-8.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.vertex_count();
        for i in 0..n {
            for j in 0..n {
                if (self.omega[(i, j)] - self.omega[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Numeric("precision matrix is not symmetric".into()));
                }
            }
        }
        let min_eig = self
            .omega
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 1e-10 {
            return Err(Error::Numeric(format!(
                "precision matrix is not positive definite (min eigenvalue {min_eig:e})"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let nonzero = self.omega[(i, j)] != 0.0;
                    if nonzero != self.graph.is_adjacent(i, j) {
                        return Err(Error::Numeric(format!(
                            "support mismatch at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        let residual = (&self.omega * &self.sigma - DMatrix::identity(n, n)).abs().max();
        if residual > 1e-8 {
            return Err(Error::Numeric(format!(
                "omega * sigma deviates from identity by {residual:e}"
            )));
        }
        Ok(())
    }
}

/// Controls for model generation and the faithfulness audit.
#[derive(Debug, Clone)]
pub struct GenerateOptions {
    /// Absolute value range for off-diagonal precision entries; must sit
    /// strictly inside (0, 1).
    pub magnitude_range: (f64, f64),
    /// Uniform jitter added to each diagonal entry on top of the row
    /// absolute sum.
    pub diagonal_jitter: (f64, f64),
    /// Audit lower bound on |partial correlation| for non-separating sets.
    pub audit_epsilon: f64,
    /// Largest conditioning-set size the audit sweeps; `None` sweeps
    /// every order up to `|V| - 2`.
    pub audit_max_order: Option<usize>,
    /// Resampling budget before generation fails.
    pub max_attempts: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            magnitude_range: (0.2, 0.8),
            diagonal_jitter: (0.1, 0.5),
            audit_epsilon: 1e-6,
            audit_max_order: None,
            max_attempts: 100,
        }
    }
}

/// Generates a faithful Gaussian model for `graph` with default options.
///
/// Off-diagonal precision entries take a random sign and a magnitude in
/// `magnitude_range`; diagonals dominate their row absolute sum, so the
/// precision matrix is positive definite by construction. The audit then
/// sweeps every pair and every conditioning set up to the audit order: a
/// set that fails to separate the pair must witness |partial correlation|
/// above `audit_epsilon`, otherwise the model is resampled under the next
/// seed (up to `max_attempts`).
pub fn generate_faithful_model(
    graph: &UndirectedGraph,
    magnitude_range: (f64, f64),
    seed: u64,
) -> Result<GaussianModel> {
    generate_faithful_model_with(
        graph,
        seed,
        &GenerateOptions { magnitude_range, ..GenerateOptions::default() },
    )
}

pub fn generate_faithful_model_with(
    graph: &UndirectedGraph,
    seed: u64,
    options: &GenerateOptions,
) -> Result<GaussianModel> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(Error::Domain("cannot build a model over zero variables".into()));
    }
    let (lo, hi) = options.magnitude_range;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::Domain(
            "magnitude range must satisfy 0 < lo < hi < 1".into(),
        ));
    }
    let (jlo, jhi) = options.diagonal_jitter;
    if !(0.0 < jlo && jlo < jhi) {
        return Err(Error::Domain("diagonal jitter must satisfy 0 < lo < hi".into()));
    }

    let mut last_offender: Option<(usize, usize, VertexSet)> = None;
    for attempt in 0..options.max_attempts.max(1) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut omega = DMatrix::<f64>::zeros(n, n);
        for (u, v) in graph.edges() {
            let magnitude = rng.random_range(lo..hi);
            let value = if rng.random_bool(0.5) { magnitude } else { -magnitude };
            omega[(u, v)] = value;
            omega[(v, u)] = value;
        }
        for i in 0..n {
            let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| omega[(i, j)].abs()).sum();
            omega[(i, i)] = row_sum + rng.random_range(jlo..jhi);
        }
        let Some(chol) = omega.clone().cholesky() else {
            continue; // cannot happen under strict dominance, resample anyway
        };
        let sigma = chol.inverse();
        let model = GaussianModel { omega, sigma, graph: graph.clone() };

        match audit(&model, options) {
            Ok(()) => return Ok(model),
            Err((a, b, set)) => last_offender = Some((a, b, set)),
        }
    }

    let (a, b, set) = last_offender.unwrap_or((0, 0, VertexSet::new()));
    Err(Error::Generation {
        attempts: options.max_attempts.max(1),
        a: graph.label_of(a).to_string(),
        b: graph.label_of(b).to_string(),
        set: set.iter().map(|&v| graph.label_of(v).to_string()).collect(),
    })
}

/// Sweeps every pair and conditioning set: separating sets must show a
/// near-zero partial correlation, non-separating sets must stay above the
/// audit threshold. Returns the offending triple on failure.
fn audit(
    model: &GaussianModel,
    options: &GenerateOptions,
) -> std::result::Result<(), (usize, usize, VertexSet)> {
    let g = model.graph();
    let n = g.vertex_count();
    let full_order = n.saturating_sub(2);
    let max_order = options.audit_max_order.unwrap_or(full_order).min(full_order);
    for a in 0..n {
        for b in (a + 1)..n {
            let pool: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
            for size in 0..=max_order {
                for s in combinations(&pool, size) {
                    let sep = g
                        .separates(&VertexSet::from([a]), &VertexSet::from([b]), &s)
                        .expect("valid query");
                    let rho = match partial_correlation(model.sigma(), a, b, &s) {
                        Ok(r) => r,
                        Err(_) => return Err((a, b, s)),
                    };
                    if sep {
                        // Separation must imply a vanishing partial correlation;
                        // failure here means numerical breakdown, so resample.
                        if rho.abs() > 1e-9 {
                            return Err((a, b, s));
                        }
                    } else if rho.abs() <= options.audit_epsilon {
                        return Err((a, b, s));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Partial correlation of the variables at `a` and `b` given `s`, from a
/// covariance matrix: invert the covariance restricted to `{a, b} ∪ s`
/// and normalize the off-diagonal of the result.
pub fn partial_correlation(
    sigma: &DMatrix<f64>,
    a: usize,
    b: usize,
    s: &VertexSet,
) -> Result<f64> {
    if sigma.nrows() != sigma.ncols() {
        return Err(Error::Domain("covariance matrix must be square".into()));
    }
    check_query(sigma.nrows(), a, b, s)?;
    let mut idx = vec![a, b];
    idx.extend(s.iter().copied());
    let m = sigma.select_rows(&idx).select_columns(&idx);
    let Some(chol) = m.clone().cholesky() else {
        return Err(Error::Numeric(
            "covariance submatrix is not positive definite".into(),
        ));
    };
    let k = chol.inverse();
    let condition = one_norm(&m) * one_norm(&k);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::Numeric(format!(
            "covariance submatrix too ill-conditioned (estimate {condition:.3e})"
        )));
    }
    let rho = -k[(0, 1)] / (k[(0, 0)] * k[(1, 1)]).sqrt();
    Ok(rho.clamp(-1.0, 1.0))
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum())
        .fold(0.0, f64::max)
}

/// Draws `n` independent rows from the zero-mean Gaussian with the
/// model's covariance; bit-identical for a fixed seed.
pub fn sample(model: &GaussianModel, n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    let p = model.vertex_count();
    let Some(chol) = model.sigma().clone().cholesky() else {
        return Err(Error::Numeric("covariance factorization failed".into()));
    };
    let l = chol.l();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut data = DMatrix::<f64>::zeros(n, p);
    let mut z = vec![0.0f64; p];
    for row in 0..n {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        for i in 0..p {
            // x_i = sum_j L[i, j] * z_j over the lower triangle
            let mut acc = 0.0;
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                acc += l[(i, j)] * zj;
            }
            data[(row, i)] = acc;
        }
    }
    Ok(data)
}

/// Population-exact oracle over a Gaussian model: a pair is independent
/// given `s` when its partial correlation is within `epsilon` of zero.
pub struct PopulationOracle {
    model: GaussianModel,
    epsilon: f64,
    count: AtomicU64,
}

impl PopulationOracle {
    pub fn new(model: GaussianModel, config: &TestConfig) -> Self {
        Self { model, epsilon: config.epsilon, count: AtomicU64::new(0) }
    }

    pub fn model(&self) -> &GaussianModel {
        &self.model
    }
}

impl CiOracle for PopulationOracle {
    fn vertex_count(&self) -> usize {
        self.model.vertex_count()
    }

    fn labels(&self) -> &[String] {
        self.model.graph().labels()
    }

    fn query(&self, a: usize, b: usize, s: &VertexSet) -> Result<bool> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let rho = partial_correlation(self.model.sigma(), a, b, s)?;
        Ok(rho.abs() <= self.epsilon)
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}
