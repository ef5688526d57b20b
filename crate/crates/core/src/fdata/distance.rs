//! Quadrature-weighted L² and L¹ distances between curves.
//!
//! Sampled curves use the grid's quadrature weights directly. Basis curves use
//! the Gram matrix for L² (`sqrt(dᵀ G d)`), and for L¹, which has no closed
//! form in coefficient space, are sampled on the basis' uniform fine grid.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::basis::BasisSystem;
use super::dataset::FunctionalDataset;
use super::grid::{linspace, trapezoidal_weights, SamplingGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    L2,
    L1,
}

fn check_len(x: &[f64], y: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected || y.len() != expected {
        return Err(Error::RepresentationMismatch(format!(
            "curves of length {} and {} on a representation of size {expected}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn weighted_l2(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    w.iter()
        .zip(x.iter().zip(y))
        .map(|(w, (a, b))| w * (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn weighted_l1(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    w.iter()
        .zip(x.iter().zip(y))
        .map(|(w, (a, b))| w * (a - b).abs())
        .sum()
}

fn gram_l2(gram: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let k = x.len();
    let mut q = 0.0;
    for r in 0..k {
        let dr = x[r] - y[r];
        if dr == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for c in 0..k {
            row += gram[(r, c)] * (x[c] - y[c]);
        }
        q += dr * row;
    }
    q.max(0.0).sqrt()
}

/// `sqrt(Σ_j w_j (x_j - y_j)²)` for two curves sampled on `grid`.
pub fn grid_l2(grid: &SamplingGrid, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y, grid.len())?;
    Ok(weighted_l2(grid.weights(), x, y))
}

/// `Σ_j w_j |x_j - y_j|` for two curves sampled on `grid`.
pub fn grid_l1(grid: &SamplingGrid, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y, grid.len())?;
    Ok(weighted_l1(grid.weights(), x, y))
}

/// `sqrt((c_x - c_y)ᵀ G (c_x - c_y))`.
pub fn basis_l2(basis: &BasisSystem, cx: &[f64], cy: &[f64]) -> Result<f64> {
    check_len(cx, cy, basis.n_basis())?;
    Ok(gram_l2(basis.gram(), cx, cy))
}

/// L¹ distance of two basis curves, trapezoid rule on the basis' fine grid.
pub fn basis_l1(basis: &BasisSystem, cx: &[f64], cy: &[f64]) -> Result<f64> {
    check_len(cx, cy, basis.n_basis())?;
    let (pts, w) = fine_grid(basis);
    let mut phi = vec![0.0; basis.n_basis()];
    let mut total = 0.0;
    for (t, wt) in pts.iter().zip(&w) {
        basis.eval_into(*t, &mut phi);
        let d: f64 = phi
            .iter()
            .zip(cx.iter().zip(cy))
            .map(|(p, (a, b))| p * (a - b))
            .sum();
        total += wt * d.abs();
    }
    Ok(total)
}

fn fine_grid(basis: &BasisSystem) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = basis.domain();
    let pts = linspace(a, b, basis.fine_points());
    let w = trapezoidal_weights(&pts).expect("fine grid is valid");
    (pts, w)
}

fn row(m: &DMatrix<f64>, i: usize) -> Vec<f64> {
    m.row(i).iter().copied().collect()
}

fn check_index(ds: &FunctionalDataset, i: usize) -> Result<()> {
    if i >= ds.n_curves() {
        return Err(Error::Dimension(format!(
            "curve index {i} out of range for {} curves",
            ds.n_curves()
        )));
    }
    Ok(())
}

/// L² distance between curves `i` and `j` of one dataset.
pub fn l2_distance(ds: &FunctionalDataset, i: usize, j: usize) -> Result<f64> {
    l2_between(ds, i, ds, j)
}

/// L¹ distance between curves `i` and `j` of one dataset.
pub fn l1_distance(ds: &FunctionalDataset, i: usize, j: usize) -> Result<f64> {
    l1_between(ds, i, ds, j)
}

/// L² distance between curve `i` of `a` and curve `j` of `b`; the two must
/// share a grid or a basis.
pub fn l2_between(a: &FunctionalDataset, i: usize, b: &FunctionalDataset, j: usize) -> Result<f64> {
    check_index(a, i)?;
    check_index(b, j)?;
    match (a, b) {
        (FunctionalDataset::Discretized(x), FunctionalDataset::Discretized(y)) => {
            same_grid(x.grid(), y.grid())?;
            grid_l2(x.grid(), &row(x.values(), i), &row(y.values(), j))
        }
        (FunctionalDataset::Basis(x), FunctionalDataset::Basis(y)) => {
            same_basis(x.basis(), y.basis())?;
            basis_l2(x.basis(), &row(x.coefficients(), i), &row(y.coefficients(), j))
        }
        _ => Err(mixed()),
    }
}

pub fn l1_between(a: &FunctionalDataset, i: usize, b: &FunctionalDataset, j: usize) -> Result<f64> {
    check_index(a, i)?;
    check_index(b, j)?;
    match (a, b) {
        (FunctionalDataset::Discretized(x), FunctionalDataset::Discretized(y)) => {
            same_grid(x.grid(), y.grid())?;
            grid_l1(x.grid(), &row(x.values(), i), &row(y.values(), j))
        }
        (FunctionalDataset::Basis(x), FunctionalDataset::Basis(y)) => {
            same_basis(x.basis(), y.basis())?;
            basis_l1(x.basis(), &row(x.coefficients(), i), &row(y.coefficients(), j))
        }
        _ => Err(mixed()),
    }
}

fn mixed() -> Error {
    Error::RepresentationMismatch("cannot compare a sampled curve with a basis curve".into())
}

fn same_grid(a: &SamplingGrid, b: &SamplingGrid) -> Result<()> {
    if std::ptr::eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::RepresentationMismatch(
            "curves are sampled on different grids".into(),
        ))
    }
}

fn same_basis(a: &BasisSystem, b: &BasisSystem) -> Result<()> {
    if std::ptr::eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::RepresentationMismatch(
            "curves are expanded in different bases".into(),
        ))
    }
}

/// Symmetric `N x N` matrix of pairwise distances with an exactly zero
/// diagonal. Entries are computed for `j > i` and mirrored.
pub fn pairwise_distances(ds: &FunctionalDataset, metric: Metric) -> DMatrix<f64> {
    enum Prepared<'a> {
        Weighted(&'a [f64]),
        Gram(&'a DMatrix<f64>),
    }
    let owned_weights;
    let (rows, prepared): (Vec<Vec<f64>>, Prepared) = match (ds, metric) {
        (FunctionalDataset::Discretized(d), _) => {
            let rows = (0..d.n_curves()).map(|i| row(d.values(), i)).collect();
            (rows, Prepared::Weighted(d.grid().weights()))
        }
        (FunctionalDataset::Basis(b), Metric::L2) => {
            let rows = (0..b.n_curves()).map(|i| row(b.coefficients(), i)).collect();
            (rows, Prepared::Gram(b.basis().gram()))
        }
        (FunctionalDataset::Basis(b), Metric::L1) => {
            let (pts, w) = fine_grid(b.basis());
            let sampled = b.coefficients() * b.basis().design_matrix(&pts).transpose();
            owned_weights = w;
            let rows = (0..b.n_curves()).map(|i| row(&sampled, i)).collect();
            (rows, Prepared::Weighted(&owned_weights))
        }
    };

    let n = rows.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| match (&prepared, metric) {
                    (Prepared::Weighted(w), Metric::L2) => weighted_l2(w, &rows[i], &rows[j]),
                    (Prepared::Weighted(w), Metric::L1) => weighted_l1(w, &rows[i], &rows[j]),
                    (Prepared::Gram(g), _) => gram_l2(g, &rows[i], &rows[j]),
                })
                .collect()
        })
        .collect();

    let mut d = DMatrix::zeros(n, n);
    for (i, r) in upper.into_iter().enumerate() {
        for (off, v) in r.into_iter().enumerate() {
            let j = i + 1 + off;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}
