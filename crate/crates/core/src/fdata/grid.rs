use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Composite trapezoid weights for a strictly increasing set of abscissae.
///
/// `w_1 = (t_2 - t_1)/2`, `w_M = (t_M - t_{M-1})/2` and
/// `w_j = (t_{j+1} - t_{j-1})/2` in between, so the weights sum to the span.
pub fn trapezoidal_weights(points: &[f64]) -> Result<Vec<f64>> {
    check_points(points)?;
    let m = points.len();
    let mut w = vec![0.0; m];
    for j in 0..m - 1 {
        let half = 0.5 * (points[j + 1] - points[j]);
        w[j] += half;
        w[j + 1] += half;
    }
    Ok(w)
}

fn check_points(points: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(bad) = points.iter().position(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("point {bad} is not finite")));
    }
    if let Some(j) = points.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "points must be strictly increasing: t[{}] = {} >= t[{}] = {}",
            j,
            points[j],
            j + 1,
            points[j + 1]
        )));
    }
    Ok(())
}

/// Shared evaluation grid with per-point quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRecord", into = "GridRecord")]
pub struct SamplingGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridRecord {
    points: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl TryFrom<GridRecord> for SamplingGrid {
    type Error = Error;

    fn try_from(r: GridRecord) -> Result<Self> {
        match r.weights {
            Some(w) => SamplingGrid::with_weights(r.points, w),
            None => SamplingGrid::trapezoidal(r.points),
        }
    }
}

impl From<SamplingGrid> for GridRecord {
    fn from(g: SamplingGrid) -> Self {
        GridRecord {
            points: g.points,
            weights: Some(g.weights),
        }
    }
}

impl SamplingGrid {
    /// Grid with composite trapezoid weights.
    pub fn trapezoidal(points: Vec<f64>) -> Result<Self> {
        let weights = trapezoidal_weights(&points)?;
        Ok(SamplingGrid { points, weights })
    }

    /// `m` equally spaced points on `[a, b]` with trapezoid weights.
    pub fn uniform(a: f64, b: f64, m: usize) -> Result<Self> {
        if m < 2 || !(b > a) {
            return Err(Error::InvalidGrid(format!(
                "uniform grid needs m >= 2 and b > a (m = {m}, a = {a}, b = {b})"
            )));
        }
        Self::trapezoidal(linspace(a, b, m))
    }

    /// Grid with caller-supplied nonnegative weights.
    pub fn with_weights(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_points(&points)?;
        if weights.len() != points.len() {
            return Err(Error::InvalidGrid(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if let Some(j) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "weight {j} = {} is negative or not finite",
                weights[j]
            )));
        }
        Ok(SamplingGrid { points, weights })
    }

    /// Index grid `0, 1, ..., m-1` with unit weights: turns the L² machinery
    /// into plain Euclidean geometry on raw feature vectors.
    pub fn unit(m: usize) -> Result<Self> {
        Self::with_weights((0..m).map(|j| j as f64).collect(), vec![1.0; m])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn span(&self) -> f64 {
        self.end() - self.start()
    }

    /// Keep the first `m` points, recomputing trapezoid weights.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m > self.len() {
            return Err(Error::Dimension(format!(
                "cannot truncate a {}-point grid to {m} points",
                self.len()
            )));
        }
        Self::trapezoidal(self.points[..m].to_vec())
    }
}

/// `m` equally spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    match m {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (m - 1) as f64;
            let mut v: Vec<f64> = (0..m).map(|j| a + h * j as f64).collect();
            v[m - 1] = b;
            v
        }
    }
}
