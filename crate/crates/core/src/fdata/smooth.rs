use nalgebra::DMatrix;

use super::basis::BasisSystem;
use super::dataset::{BasisDataset, DiscretizedDataset};
use crate::error::{Error, Result};

/// Weighted least-squares projection of sampled curves onto `basis`.
///
/// Each row's coefficients minimise `Σ_j w_j (x(t_j) - cᵀφ(t_j))²` with the
/// grid's quadrature weights. No roughness penalty is applied.
pub fn smooth_to_basis(raw: &DiscretizedDataset, basis: &BasisSystem) -> Result<BasisDataset> {
    let grid = raw.grid();
    let k = basis.n_basis();
    let m = grid.len();
    if k > m {
        return Err(Error::Dimension(format!(
            "cannot fit {k} basis functions to {m} grid points"
        )));
    }
    if !basis.covers(grid.start(), grid.end()) {
        let (a, b) = basis.domain();
        return Err(Error::InvalidParameter(format!(
            "basis domain [{a}, {b}] does not cover the grid span [{}, {}]",
            grid.start(),
            grid.end()
        )));
    }

    let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let mut design = basis.design_matrix(grid.points());
    for (j, s) in sqrt_w.iter().enumerate() {
        design.row_mut(j).scale_mut(*s);
    }
    let mut rhs = raw.values().transpose();
    for (j, s) in sqrt_w.iter().enumerate() {
        rhs.row_mut(j).scale_mut(*s);
    }

    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    // anchored to the L² size of the basis functions as well, so a design
    // that is uniformly tiny on the grid still counts as deficient
    let scale = basis.gram().diagonal().max().max(0.0).sqrt();
    let tol = ((m.max(k) as f64) * f64::EPSILON * smax).max(1e-10 * scale);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    if rank < k {
        return Err(Error::SingularFit {
            basis: basis.describe(),
            rank,
            n_basis: k,
        });
    }
    let solution: DMatrix<f64> = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::NumericFailure(format!("least-squares solve failed: {e}")))?;

    BasisDataset::new(basis.clone(), solution.transpose(), raw.labels().cloned())
}
