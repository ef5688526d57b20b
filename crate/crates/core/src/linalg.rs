//! Dense symmetric eigen-solves and the small helpers shared by the
//! spectral methods.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// One eigenvector per column, in the same order as `values`.
    pub vectors: DMatrix<f64>,
}

/// Relative gap below which two neighbouring eigenvalues count as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Eigendecomposition of a symmetric matrix with eigenvalues in descending
/// order. The sort is stable, so exactly tied eigenvalues keep solver order.
pub fn symmetric_eigen(matrix: DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure(
            "matrix passed to the eigensolver has non-finite entries".into(),
        ));
    }
    let frobenius = matrix.norm();
    let max_abs = matrix.amax();
    let max_iter = 1000 * n.max(10);
    let eig = nalgebra::SymmetricEigen::try_new(matrix, f64::EPSILON, max_iter).ok_or_else(|| {
        Error::NumericFailure(format!(
            "symmetric eigensolver did not converge on a {n}x{n} matrix \
             (frobenius norm {frobenius:e}, max |entry| {max_abs:e})"
        ))
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Indices `l` such that eigenvalues `l` and `l + 1` are tied.
pub fn tied_pairs(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] - w[1]).abs() <= TIE_TOLERANCE * w[0].abs().max(1.0))
        .map(|(l, _)| l)
        .collect()
}

/// Flip the sign of `v` so its largest-magnitude entry (first one on ties)
/// is positive. Returns the factor applied (+1 or -1).
pub fn orient(v: &mut [f64]) -> f64 {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
        -1.0
    } else {
        1.0
    }
}

/// Symmetric square root and inverse square root of a symmetric
/// positive-definite metric.
///
/// Eigenvalues below `floor` (relative to the largest) make the inverse root
/// undefined and yield [`Error::NonInvertibleMetric`].
pub fn metric_roots(metric: &DMatrix<f64>, floor: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = symmetric_eigen(metric.clone())?;
    let max = eig.values.first().copied().unwrap_or(0.0);
    let min = eig.values.last().copied().unwrap_or(0.0);
    if !(max > 0.0) || min <= floor * max {
        return Err(Error::NonInvertibleMetric {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    let v = &eig.vectors;
    let sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|x| x.sqrt()),
    ));
    let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|x| 1.0 / x.sqrt()),
    ));
    let root = symmetrize(v * sqrt * v.transpose());
    let inv_root = symmetrize(v * inv_sqrt * v.transpose());
    Ok((root, inv_root))
}

/// `(m + mᵀ) / 2`.
pub fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Euclidean distance between rows `i` and `j` of `m`.
pub fn row_distance(m: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    m.row(i)
        .iter()
        .zip(m.row(j).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_descending() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, -1.0]);
        let e = symmetric_eigen(m).unwrap();
        assert_eq!(e.values, vec![5.0, 2.0, -1.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orient_makes_largest_entry_positive() {
        let mut v = vec![0.1, -0.9, 0.3];
        assert_eq!(orient(&mut v), -1.0);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        let mut w = vec![0.5, -0.5];
        assert_eq!(orient(&mut w), 1.0);
    }

    #[test]
    fn metric_roots_invert() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let (r, ir) = metric_roots(&m, 1e-12).unwrap();
        assert!((&r * &r - &m).amax() < 1e-12);
        assert!((&r * &ir - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn singular_metric_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            metric_roots(&m, 1e-12),
            Err(Error::NonInvertibleMetric { .. })
        ));
    }

    #[test]
    fn ties_detected() {
        assert_eq!(tied_pairs(&[1.0, 0.5, 0.5, 0.1]), vec![1]);
    }
}
