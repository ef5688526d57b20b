//! Truncated function bases: B-splines, Fourier and short lists of closed-form
//! functions, each carrying its Gram matrix of pairwise L² inner products.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::grid::{linspace, trapezoidal_weights};
use crate::error::{Error, Result};
use crate::linalg::symmetrize;

/// Points of the uniform trapezoid grid used to integrate Gram entries.
pub const GRAM_QUADRATURE_POINTS: usize = 4097;

/// Default size of the uniform grid on which basis curves are sampled when an
/// integral has no closed form in coefficient space (the L¹ distance).
pub const DEFAULT_FINE_GRID_POINTS: usize = 512;

/// A named closed-form basis function of one real variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum ClosedFormFn {
    /// `sin(freq * x)`
    Sin { freq: f64 },
    /// `cos(freq * x)`
    Cos { freq: f64 },
    /// `c_0 + c_1 x + c_2 x² + ...`
    Polynomial { coefficients: Vec<f64> },
}

impl ClosedFormFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ClosedFormFn::Sin { freq } => (freq * x).sin(),
            ClosedFormFn::Cos { freq } => (freq * x).cos(),
            ClosedFormFn::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
        }
    }
}

impl fmt::Display for ClosedFormFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedFormFn::Sin { freq } => write!(f, "sin({freq}x)"),
            ClosedFormFn::Cos { freq } => write!(f, "cos({freq}x)"),
            ClosedFormFn::Polynomial { coefficients } => {
                let terms: Vec<String> = coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(p, c)| match p {
                        0 => format!("{c}"),
                        1 => format!("{c}x"),
                        _ => format!("{c}x^{p}"),
                    })
                    .collect();
                if terms.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", terms.join(" + "))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisKind {
    /// B-splines of the given order (polynomial degree `order - 1`).
    Bspline {
        order: usize,
        n_basis: usize,
        knots: Vec<f64>,
    },
    /// `1/√P, √(2/P) sin(2πk(t-a)/P), √(2/P) cos(2πk(t-a)/P), ...`
    Fourier { n_basis: usize, period: f64 },
    ClosedForm { functions: Vec<ClosedFormFn> },
}

impl BasisKind {
    fn label(&self) -> String {
        match self {
            BasisKind::Bspline { order, n_basis, .. } => {
                format!("B-spline (order {order}, {n_basis} functions)")
            }
            BasisKind::Fourier { n_basis, .. } => format!("Fourier ({n_basis} functions)"),
            BasisKind::ClosedForm { functions } => {
                let names: Vec<String> = functions.iter().map(|f| f.to_string()).collect();
                format!("closed-form {{{}}}", names.join(", "))
            }
        }
    }
}

/// A truncated basis on a closed interval together with its Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRecord", into = "BasisRecord")]
pub struct BasisSystem {
    kind: BasisKind,
    domain: (f64, f64),
    gram: DMatrix<f64>,
    fine_points: usize,
}

#[derive(Serialize, Deserialize)]
struct BasisRecord {
    #[serde(flatten)]
    kind: BasisKind,
    domain: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fine_points: Option<usize>,
    /// Informational on output; recomputed on input.
    #[serde(default, skip_deserializing)]
    gram: Vec<Vec<f64>>,
}

impl TryFrom<BasisRecord> for BasisSystem {
    type Error = Error;

    fn try_from(r: BasisRecord) -> Result<Self> {
        let basis = BasisSystem::new(r.kind, (r.domain[0], r.domain[1]))?;
        match r.fine_points {
            Some(p) => basis.with_fine_points(p),
            None => Ok(basis),
        }
    }
}

impl From<BasisSystem> for BasisRecord {
    fn from(b: BasisSystem) -> Self {
        let gram = b
            .gram
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        BasisRecord {
            kind: b.kind,
            domain: [b.domain.0, b.domain.1],
            fine_points: Some(b.fine_points),
            gram,
        }
    }
}

impl BasisSystem {
    /// Validates `kind` against `domain` and integrates the Gram matrix.
    pub fn new(kind: BasisKind, domain: (f64, f64)) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter(format!(
                "basis domain [{a}, {b}] is not a proper interval"
            )));
        }
        match &kind {
            BasisKind::Bspline {
                order,
                n_basis,
                knots,
            } => {
                if *order == 0 || n_basis < order {
                    return Err(Error::InvalidParameter(format!(
                        "B-spline needs order >= 1 and n_basis >= order (order {order}, n_basis {n_basis})"
                    )));
                }
                if knots.len() != n_basis + order {
                    return Err(Error::InvalidParameter(format!(
                        "B-spline with {n_basis} functions of order {order} needs {} knots, got {}",
                        n_basis + order,
                        knots.len()
                    )));
                }
                if knots.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidParameter(
                        "B-spline knots must be nondecreasing".into(),
                    ));
                }
                let lo = knots[order - 1];
                let hi = knots[*n_basis];
                if (lo - a).abs() > 1e-12 * (b - a) || (hi - b).abs() > 1e-12 * (b - a) {
                    return Err(Error::InvalidParameter(format!(
                        "B-spline knots cover [{lo}, {hi}] but the domain is [{a}, {b}]"
                    )));
                }
            }
            BasisKind::Fourier { n_basis, period } => {
                if *n_basis == 0 || !(period.is_finite() && *period > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "Fourier basis needs n_basis >= 1 and a positive period (n_basis {n_basis}, period {period})"
                    )));
                }
            }
            BasisKind::ClosedForm { functions } => {
                if functions.is_empty() {
                    return Err(Error::InvalidParameter(
                        "closed-form basis needs at least one function".into(),
                    ));
                }
            }
        }
        let mut basis = BasisSystem {
            kind,
            domain,
            gram: DMatrix::zeros(0, 0),
            fine_points: DEFAULT_FINE_GRID_POINTS,
        };
        basis.gram = basis.compute_gram(GRAM_QUADRATURE_POINTS);
        Ok(basis)
    }

    /// B-splines with uniformly spaced interior knots and `order`-fold end
    /// knots. `order = degree + 1`.
    pub fn bspline(domain: (f64, f64), order: usize, n_basis: usize) -> Result<Self> {
        if order == 0 || n_basis < order {
            return Err(Error::InvalidParameter(format!(
                "B-spline needs order >= 1 and n_basis >= order (order {order}, n_basis {n_basis})"
            )));
        }
        let (a, b) = domain;
        let breaks = linspace(a, b, n_basis - order + 2);
        let mut knots = vec![a; order - 1];
        knots.extend_from_slice(&breaks);
        knots.extend(std::iter::repeat_n(b, order - 1));
        Self::new(
            BasisKind::Bspline {
                order,
                n_basis,
                knots,
            },
            domain,
        )
    }

    /// Fourier basis whose period is the domain length (orthonormal on it).
    pub fn fourier(domain: (f64, f64), n_basis: usize) -> Result<Self> {
        Self::new(
            BasisKind::Fourier {
                n_basis,
                period: domain.1 - domain.0,
            },
            domain,
        )
    }

    pub fn closed_form(domain: (f64, f64), functions: Vec<ClosedFormFn>) -> Result<Self> {
        Self::new(BasisKind::ClosedForm { functions }, domain)
    }

    /// Override the fine grid size used for L¹ distances.
    pub fn with_fine_points(mut self, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter(format!(
                "fine grid needs at least 2 points, got {points}"
            )));
        }
        self.fine_points = points;
        Ok(self)
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn n_basis(&self) -> usize {
        match &self.kind {
            BasisKind::Bspline { n_basis, .. } | BasisKind::Fourier { n_basis, .. } => *n_basis,
            BasisKind::ClosedForm { functions } => functions.len(),
        }
    }

    /// Pairwise inner products `∫ φ_k φ_l` over the domain.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn fine_points(&self) -> usize {
        self.fine_points
    }

    pub fn describe(&self) -> String {
        self.kind.label()
    }

    /// Values of all basis functions at `t`, written into `out` (length K).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_basis());
        match &self.kind {
            BasisKind::Bspline {
                order,
                n_basis,
                knots,
            } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                let p = order - 1;
                if t < knots[p] || t > knots[*n_basis] {
                    return;
                }
                let span = find_span(*n_basis, p, knots, t);
                let vals = bspline_nonzero(span, t, p, knots);
                for (r, v) in vals.into_iter().enumerate() {
                    out[span - p + r] = v;
                }
            }
            BasisKind::Fourier { n_basis, period } => {
                let a = self.domain.0;
                let c0 = 1.0 / period.sqrt();
                let c = (2.0 / period).sqrt();
                out[0] = c0;
                for k in 1..*n_basis {
                    let harmonic = k.div_ceil(2) as f64;
                    let arg = 2.0 * PI * harmonic * (t - a) / period;
                    out[k] = if k % 2 == 1 { c * arg.sin() } else { c * arg.cos() };
                }
            }
            BasisKind::ClosedForm { functions } => {
                for (o, f) in out.iter_mut().zip(functions) {
                    *o = f.eval(t);
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_basis()];
        self.eval_into(t, &mut out);
        out
    }

    /// `M x K` matrix of basis values at `points`.
    pub fn design_matrix(&self, points: &[f64]) -> DMatrix<f64> {
        let k = self.n_basis();
        let mut m = DMatrix::zeros(points.len(), k);
        let mut row = vec![0.0; k];
        for (j, &t) in points.iter().enumerate() {
            self.eval_into(t, &mut row);
            for (c, v) in row.iter().enumerate() {
                m[(j, c)] = *v;
            }
        }
        m
    }

    /// Gram matrix by composite trapezoid on `n_points` uniform points,
    /// averaged with its transpose.
    pub fn compute_gram(&self, n_points: usize) -> DMatrix<f64> {
        let pts = linspace(self.domain.0, self.domain.1, n_points.max(2));
        let w = trapezoidal_weights(&pts).expect("uniform grid is valid");
        let phi = self.design_matrix(&pts);
        let mut weighted = phi.clone();
        for (j, wj) in w.iter().enumerate() {
            weighted.row_mut(j).scale_mut(*wj);
        }
        symmetrize(phi.transpose() * weighted)
    }

    /// Whether `[lo, hi]` lies inside the domain (up to rounding).
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let tol = 1e-12 * (self.domain.1 - self.domain.0);
        lo >= self.domain.0 - tol && hi <= self.domain.1 + tol
    }
}

/// Gram matrix of `basis`, integrated on `n_points` uniform points.
pub fn gram_matrix(basis: &BasisSystem, n_points: usize) -> DMatrix<f64> {
    basis.compute_gram(n_points)
}

fn find_span(n_basis: usize, p: usize, knots: &[f64], t: f64) -> usize {
    if t >= knots[n_basis] {
        // right end belongs to the last non-degenerate span
        let mut s = n_basis - 1;
        while s > p && knots[s] == knots[s + 1] {
            s -= 1;
        }
        return s;
    }
    let (mut lo, mut hi) = (p, n_basis);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Cox-de Boor values of the `p + 1` B-splines that are nonzero on `span`.
fn bspline_nonzero(span: usize, t: f64, p: usize, knots: &[f64]) -> Vec<f64> {
    let mut n = vec![0.0; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    n[0] = 1.0;
    for j in 1..=p {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom == 0.0 { 0.0 } else { n[r] / denom };
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    n
}
