use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::BasisSystem;
use super::grid::SamplingGrid;
use crate::error::{Error, Result};

/// Per-curve metadata. Never read by fitting code, only by scorers and
/// exporters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Labels {
    Continuous(Vec<f64>),
    Categorical(Vec<String>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Categorical(v) => v.len(),
            Labels::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Text form of label `i`.
    pub fn text(&self, i: usize) -> String {
        match self {
            Labels::Categorical(v) => v[i].clone(),
            Labels::Continuous(v) => crate::io::format_float(v[i]),
        }
    }

    /// Class index per curve, classes numbered in order of first appearance.
    pub fn class_indices(&self) -> Result<(Vec<usize>, Vec<String>)> {
        match self {
            Labels::Categorical(v) => {
                let mut names: Vec<String> = Vec::new();
                let idx = v
                    .iter()
                    .map(|s| match names.iter().position(|n| n == s) {
                        Some(p) => p,
                        None => {
                            names.push(s.clone());
                            names.len() - 1
                        }
                    })
                    .collect();
                Ok((idx, names))
            }
            Labels::Continuous(_) => Err(Error::ScorerMismatch(
                "categorical labels required, found a continuous parameter".into(),
            )),
        }
    }

    /// Numeric form: continuous labels directly, categorical ones if every
    /// entry parses as a number.
    pub fn continuous(&self) -> Result<Vec<f64>> {
        match self {
            Labels::Continuous(v) => Ok(v.clone()),
            Labels::Categorical(v) => v
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| {
                    Error::ScorerMismatch(
                        "continuous parameter required, labels are not numeric".into(),
                    )
                }),
        }
    }

    pub fn select(&self, rows: &[usize]) -> Labels {
        match self {
            Labels::Categorical(v) => Labels::Categorical(rows.iter().map(|&i| v[i].clone()).collect()),
            Labels::Continuous(v) => Labels::Continuous(rows.iter().map(|&i| v[i]).collect()),
        }
    }
}

fn check_labels(labels: &Option<Labels>, n: usize) -> Result<()> {
    match labels {
        Some(l) if l.len() != n => Err(Error::InvalidData(format!(
            "{} labels for {n} curves",
            l.len()
        ))),
        _ => Ok(()),
    }
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    match m.iter().position(|v| !v.is_finite()) {
        Some(p) => {
            let (r, c) = (p % m.nrows(), p / m.nrows());
            Err(Error::InvalidData(format!(
                "{what} entry ({r}, {c}) is not finite"
            )))
        }
        None => Ok(()),
    }
}

/// Curves sampled on a shared grid; row `i` holds `x_i(t_1..t_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedDataset {
    grid: SamplingGrid,
    values: DMatrix<f64>,
    labels: Option<Labels>,
}

impl DiscretizedDataset {
    pub fn new(grid: SamplingGrid, values: DMatrix<f64>, labels: Option<Labels>) -> Result<Self> {
        if values.ncols() != grid.len() {
            return Err(Error::InvalidData(format!(
                "{} sample columns for a {}-point grid",
                values.ncols(),
                grid.len()
            )));
        }
        check_finite(&values, "sample")?;
        check_labels(&labels, values.nrows())?;
        Ok(DiscretizedDataset {
            grid,
            values,
            labels,
        })
    }

    /// Raw feature vectors with unit weights: L² distances become Euclidean.
    pub fn multivariate(values: DMatrix<f64>, labels: Option<Labels>) -> Result<Self> {
        let grid = SamplingGrid::unit(values.ncols())?;
        Self::new(grid, values, labels)
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn n_curves(&self) -> usize {
        self.values.nrows()
    }

    pub fn with_labels(mut self, labels: Option<Labels>) -> Result<Self> {
        check_labels(&labels, self.n_curves())?;
        self.labels = labels;
        Ok(self)
    }

    /// Keep the first `m` grid points of every curve.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        let grid = self.grid.truncate(m)?;
        let values = self.values.columns(0, m).into_owned();
        Self::new(grid, values, self.labels.clone())
    }

    /// Curves listed in `rows`, in that order.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let values = self.values.select_rows(rows);
        Self::new(
            self.grid.clone(),
            values,
            self.labels.as_ref().map(|l| l.select(rows)),
        )
    }
}

/// Curves stored as coefficients in a basis; row `i` is `c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDataset {
    basis: BasisSystem,
    coefficients: DMatrix<f64>,
    labels: Option<Labels>,
}

impl BasisDataset {
    pub fn new(
        basis: BasisSystem,
        coefficients: DMatrix<f64>,
        labels: Option<Labels>,
    ) -> Result<Self> {
        if coefficients.ncols() != basis.n_basis() {
            return Err(Error::InvalidData(format!(
                "{} coefficient columns for a {}-function basis",
                coefficients.ncols(),
                basis.n_basis()
            )));
        }
        check_finite(&coefficients, "coefficient")?;
        check_labels(&labels, coefficients.nrows())?;
        Ok(BasisDataset {
            basis,
            coefficients,
            labels,
        })
    }

    pub fn basis(&self) -> &BasisSystem {
        &self.basis
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn n_curves(&self) -> usize {
        self.coefficients.nrows()
    }

    /// Evaluate every curve on `grid`.
    pub fn sample(&self, grid: &SamplingGrid) -> Result<DiscretizedDataset> {
        let phi = self.basis.design_matrix(grid.points());
        let values = &self.coefficients * phi.transpose();
        DiscretizedDataset::new(grid.clone(), values, self.labels.clone())
    }

    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        Self::new(
            self.basis.clone(),
            self.coefficients.select_rows(rows),
            self.labels.as_ref().map(|l| l.select(rows)),
        )
    }
}

/// Either representation of a functional sample.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalDataset {
    Discretized(DiscretizedDataset),
    Basis(BasisDataset),
}

impl FunctionalDataset {
    pub fn n_curves(&self) -> usize {
        match self {
            FunctionalDataset::Discretized(d) => d.n_curves(),
            FunctionalDataset::Basis(b) => b.n_curves(),
        }
    }

    pub fn labels(&self) -> Option<&Labels> {
        match self {
            FunctionalDataset::Discretized(d) => d.labels(),
            FunctionalDataset::Basis(b) => b.labels(),
        }
    }

    /// The same sample viewed as raw feature vectors (sample values or
    /// coefficients) with unit weights, i.e. plain multivariate data.
    pub fn to_multivariate(&self) -> Result<FunctionalDataset> {
        let (values, labels) = match self {
            FunctionalDataset::Discretized(d) => (d.values().clone(), d.labels().cloned()),
            FunctionalDataset::Basis(b) => (b.coefficients().clone(), b.labels().cloned()),
        };
        Ok(FunctionalDataset::Discretized(
            DiscretizedDataset::multivariate(values, labels)?,
        ))
    }

    pub fn select(&self, rows: &[usize]) -> Result<FunctionalDataset> {
        Ok(match self {
            FunctionalDataset::Discretized(d) => FunctionalDataset::Discretized(d.select(rows)?),
            FunctionalDataset::Basis(b) => FunctionalDataset::Basis(b.select(rows)?),
        })
    }

    /// Short human-readable description of the representation.
    pub fn describe(&self) -> String {
        match self {
            FunctionalDataset::Discretized(d) => format!(
                "{} curves sampled at {} points on [{}, {}]",
                d.n_curves(),
                d.grid().len(),
                d.grid().start(),
                d.grid().end()
            ),
            FunctionalDataset::Basis(b) => format!(
                "{} curves in a {} basis",
                b.n_curves(),
                b.basis().describe()
            ),
        }
    }
}

impl From<DiscretizedDataset> for FunctionalDataset {
    fn from(d: DiscretizedDataset) -> Self {
        FunctionalDataset::Discretized(d)
    }
}

impl From<BasisDataset> for FunctionalDataset {
    fn from(b: BasisDataset) -> Self {
        FunctionalDataset::Basis(b)
    }
}
