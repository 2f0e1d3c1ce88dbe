//! Finite-sample conditional-independence testing via the Fisher z
//! transform of empirical partial correlations.

use std::io::Read;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{check_query, partial_correlation, CiOracle, TestConfig};
use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// A labelled n-by-p data matrix: one column per variable, one row per
/// observation. The CSV form has the labels as its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    labels: Vec<String>,
    data: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(labels: Vec<String>, data: DMatrix<f64>) -> Result<Self> {
        if labels.len() != data.ncols() {
            return Err(Error::Domain(format!(
                "{} labels for {} data columns",
                labels.len(),
                data.ncols()
            )));
        }
        Ok(Self { labels, data })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sample_count(&self) -> usize {
        self.data.nrows()
    }

    pub fn variable_count(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Reads the CSV form: header row of labels, then real-valued rows.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let labels: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Csv(e.to_string()))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let p = labels.len();
        let mut values: Vec<f64> = Vec::new();
        let mut rows = 0usize;
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            if record.len() != p {
                return Err(Error::Csv(format!(
                    "row {} has {} fields, expected {p}",
                    i + 2,
                    record.len()
                )));
            }
            for field in record.iter() {
                let x: f64 = field.trim().parse().map_err(|_| {
                    Error::Csv(format!("row {}: {:?} is not a number", i + 2, field))
                })?;
                values.push(x);
            }
            rows += 1;
        }
        Self::new(labels, DMatrix::from_row_slice(rows, p, &values))
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.labels.join(",");
        out.push('\n');
        for r in 0..self.data.nrows() {
            let row: Vec<String> = (0..self.data.ncols())
                .map(|c| format!("{}", self.data[(r, c)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Column means.
    pub fn means(&self) -> Vec<f64> {
        let n = self.data.nrows() as f64;
        (0..self.data.ncols())
            .map(|j| self.data.column(j).sum() / n)
            .collect()
    }

    /// Empirical covariance with the n−1 denominator. Needs at least two
    /// rows.
    pub fn empirical_covariance(&self) -> Result<DMatrix<f64>> {
        let n = self.data.nrows();
        if n < 2 {
            return Err(Error::Domain("covariance needs at least two rows".into()));
        }
        let p = self.data.ncols();
        let means = self.means();
        let mut cov = DMatrix::<f64>::zeros(p, p);
        for r in 0..n {
            for i in 0..p {
                let di = self.data[(r, i)] - means[i];
                for j in i..p {
                    cov[(i, j)] += di * (self.data[(r, j)] - means[j]);
                }
            }
        }
        let denom = (n - 1) as f64;
        for i in 0..p {
            for j in i..p {
                cov[(i, j)] /= denom;
                cov[(j, i)] = cov[(i, j)];
            }
        }
        Ok(cov)
    }
}

/// Test statistic of the Fisher z test: `atanh(r) * sqrt(n - |S| - 3)`.
pub fn fisher_z_statistic(r: f64, n: usize, conditioning_size: usize) -> f64 {
    let r = r.clamp(-1.0, 1.0);
    let z = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    z.abs() * ((n - conditioning_size - 3) as f64).sqrt()
}

/// Statistical oracle over a data matrix: a pair is declared independent
/// given `s` when the Fisher z statistic of the empirical partial
/// correlation stays below the two-sided normal critical value.
#[derive(Debug)]
pub struct FisherZOracle {
    labels: Vec<String>,
    samples: usize,
    covariance: DMatrix<f64>,
    critical: f64,
    count: AtomicU64,
}

impl FisherZOracle {
    pub fn new(data: &DataMatrix, config: &TestConfig) -> Result<Self> {
        let covariance = data.empirical_covariance()?;
        let means = data.means();
        for (j, label) in data.labels().iter().enumerate() {
            let var = covariance[(j, j)];
            if var <= 1e-15 * (1.0 + means[j] * means[j]) {
                return Err(Error::DegenerateColumn(label.clone()));
            }
        }
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let critical = normal.inverse_cdf(1.0 - config.significance / 2.0);
        Ok(Self {
            labels: data.labels().to_vec(),
            samples: data.sample_count(),
            covariance,
            critical,
            count: AtomicU64::new(0),
        })
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    /// Two-sided critical value in force for this oracle.
    pub fn critical_value(&self) -> f64 {
        self.critical
    }
}

impl CiOracle for FisherZOracle {
    fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn query(&self, a: usize, b: usize, s: &VertexSet) -> Result<bool> {
        check_query(self.labels.len(), a, b, s)?;
        if self.samples <= s.len() + 3 {
            return Err(Error::InsufficientSamples { n: self.samples, order: s.len() });
        }
        self.count.fetch_add(1, Ordering::Relaxed);
        let r = partial_correlation(&self.covariance, a, b, s)?;
        Ok(fisher_z_statistic(r, self.samples, s.len()) <= self.critical)
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}
