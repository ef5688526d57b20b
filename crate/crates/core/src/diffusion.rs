//! Diffusion maps on a dense kernel matrix.
//!
//! The kernel is α-normalised, turned into a row-stochastic transition matrix
//! `P`, and `P` is diagonalised through its symmetric conjugate
//! `S = D^{-1/2} K^{(α)} D^{-1/2}`. With `u_l` the orthonormal eigenvectors of
//! `S` and `π` the stationary distribution, the right and left eigenvectors of
//! `P` are `ψ_l = u_l / √π` and `φ_l = u_l √π`. This normalisation makes
//! `ψ_0 ≡ 1` and turns the diffusion distance into the Euclidean distance of
//! the map `Ψ_T(x_i) = (λ_l^T ψ_l(i))_{l ≥ 1}`.
//!
//! Nothing here depends on how the kernel was built, so multivariate diffusion
//! maps (unit weights) and the functional version (quadrature or Gram
//! weights) share this code.

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, Method};
use crate::error::{Error, Result};
use crate::fdata::FunctionalDataset;
use crate::kernels::{build_kernel_matrix, KernelMatrix, KernelSpec};
use crate::linalg::{compensated_sum, orient, symmetric_eigen, tied_pairs};

/// How many diffusion coordinates to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// Fixed embedding dimension `L`.
    Dimension(usize),
    /// Keep every `l` with `λ_l^T > δ λ_1^T`.
    Precision(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    alpha: f64,
    steps: u32,
    truncation: Truncation,
}

impl DiffusionParams {
    pub fn new(alpha: f64, steps: u32, truncation: Truncation) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "density parameter alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter(
                "the number of diffusion steps must be at least 1".into(),
            ));
        }
        match truncation {
            Truncation::Dimension(0) => {
                return Err(Error::InvalidParameter(
                    "embedding dimension must be at least 1".into(),
                ))
            }
            Truncation::Precision(d) if !(d > 0.0 && d < 1.0) => {
                return Err(Error::InvalidParameter(format!(
                    "precision threshold delta must lie in (0, 1), got {d}"
                )))
            }
            _ => {}
        }
        Ok(DiffusionParams {
            alpha,
            steps,
            truncation,
        })
    }

    /// Fixed-dimension parameters.
    pub fn with_dim(alpha: f64, steps: u32, dim: usize) -> Result<Self> {
        Self::new(alpha, steps, Truncation::Dimension(dim))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }
}

fn check_affinity(k: &DMatrix<f64>) -> Result<()> {
    let n = k.nrows();
    if n != k.ncols() {
        return Err(Error::Dimension(format!(
            "kernel matrix must be square, got {}x{}",
            n,
            k.ncols()
        )));
    }
    if n < 2 {
        return Err(Error::Dimension(format!(
            "diffusion maps need at least 2 points, got {n}"
        )));
    }
    for i in 0..n {
        for j in 0..n {
            let v = k[(i, j)];
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidData(format!(
                    "kernel entry ({i}, {j}) = {v} is negative or not finite"
                )));
            }
            if j > i && (v - k[(j, i)]).abs() > 1e-12 * v.abs().max(k[(j, i)].abs()).max(1.0) {
                return Err(Error::InvalidData(format!(
                    "kernel matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

fn degrees(k: &DMatrix<f64>) -> Result<DVector<f64>> {
    let d = DVector::from_iterator(
        k.nrows(),
        k.row_iter().map(|r| compensated_sum(r.iter().copied())),
    );
    if let Some(row) = d.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::ZeroDegree { row });
    }
    Ok(d)
}

/// `k_ij / (d_i^α d_j^α)` with `d_i = Σ_j k_ij`.
pub fn alpha_normalize(k: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    check_affinity(k)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "density parameter alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(k.clone());
    }
    let d = degrees(k)?;
    let da: Vec<f64> = d.iter().map(|v| v.powf(alpha)).collect();
    Ok(DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| {
        k[(i, j)] / (da[i] * da[j])
    }))
}

/// Row-normalised Markov matrix `p_ij = k_ij / Σ_j k_ij`.
pub fn transition_matrix(k_alpha: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_affinity(k_alpha)?;
    let d = degrees(k_alpha)?;
    Ok(DMatrix::from_fn(k_alpha.nrows(), k_alpha.ncols(), |i, j| {
        k_alpha[(i, j)] / d[i]
    }))
}

/// `π_i = d_i / Σ_k d_k` for the normalised kernel.
pub fn stationary_distribution(k_alpha: &DMatrix<f64>) -> Result<DVector<f64>> {
    check_affinity(k_alpha)?;
    let d = degrees(k_alpha)?;
    let total = compensated_sum(d.iter().copied());
    Ok(d / total)
}

/// Spectrum of the Markov operator built from an α-normalised kernel.
#[derive(Debug, Clone)]
pub struct DiffusionModel {
    lambda0: f64,
    psi0: DVector<f64>,
    eigenvalues: Vec<f64>,
    right: DMatrix<f64>,
    left: DMatrix<f64>,
    stationary: DVector<f64>,
    degrees: DVector<f64>,
    transition: DMatrix<f64>,
    ties: Vec<usize>,
}

/// Eigendecomposition of the transition matrix of `k_alpha`.
pub fn spectral_decompose(k_alpha: &DMatrix<f64>) -> Result<DiffusionModel> {
    check_affinity(k_alpha)?;
    let n = k_alpha.nrows();
    let d = degrees(k_alpha)?;
    let transition = DMatrix::from_fn(n, n, |i, j| k_alpha[(i, j)] / d[i]);
    let total = compensated_sum(d.iter().copied());
    let pi = &d / total;
    let sqrt_d: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| k_alpha[(i, j)] / (sqrt_d[i] * sqrt_d[j]));

    let eig = symmetric_eigen(sym)?;
    let sqrt_pi: Vec<f64> = pi.iter().map(|v| v.sqrt()).collect();

    let mut right = DMatrix::zeros(n, n);
    let mut left = DMatrix::zeros(n, n);
    for l in 0..n {
        let mut psi: Vec<f64> = (0..n).map(|i| eig.vectors[(i, l)] / sqrt_pi[i]).collect();
        let sign = orient(&mut psi);
        for i in 0..n {
            right[(i, l)] = psi[i];
            left[(i, l)] = sign * eig.vectors[(i, l)] * sqrt_pi[i];
        }
    }

    let lambda0 = eig.values[0];
    let psi0 = right.column(0).into_owned();
    let eigenvalues = eig.values[1..].to_vec();
    let ties = tied_pairs(&eigenvalues)
        .into_iter()
        .map(|l| l + 1)
        .collect::<Vec<_>>();
    match ties.len() {
        0 => {}
        1..=6 => warn!("tied diffusion eigenvalues at indices {ties:?}; those coordinates are not identifiable"),
        k => warn!(
            "{k} tied diffusion eigenvalues (indices {:?} ...); the kernel bandwidth is probably far too small or too large",
            &ties[..4]
        ),
    }

    Ok(DiffusionModel {
        lambda0,
        psi0,
        eigenvalues,
        right: right.columns(1, n - 1).into_owned(),
        left: left.columns(1, n - 1).into_owned(),
        stationary: pi,
        degrees: d,
        transition,
        ties,
    })
}

/// Largest `l` with `λ_l^T > δ λ_1^T` (at least 1). `eigenvalues` starts at `λ_1`.
pub fn select_dimension(eigenvalues: &[f64], delta: f64, steps: u32) -> usize {
    let Some(first) = eigenvalues.first() else {
        return 1;
    };
    let t = steps as i32;
    let threshold = delta * first.powi(t);
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.powi(t) > threshold)
        .map(|(i, _)| i + 1)
        .max()
        .unwrap_or(1)
}

impl DiffusionModel {
    pub fn n_points(&self) -> usize {
        self.stationary.len()
    }

    /// The trivial eigenvalue `λ_0` (1 up to rounding).
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// The trivial right eigenvector `ψ_0` (constant up to rounding).
    pub fn psi0(&self) -> &DVector<f64> {
        &self.psi0
    }

    /// Largest deviation of `ψ_0` from its mean.
    pub fn psi0_spread(&self) -> f64 {
        let mean = self.psi0.mean();
        self.psi0.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max)
    }

    /// `λ_1 ≥ λ_2 ≥ ...` (the trivial eigenvalue excluded).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `l - 1` holds `ψ_l`.
    pub fn right_eigenvectors(&self) -> &DMatrix<f64> {
        &self.right
    }

    /// Column `l - 1` holds `φ_l`.
    pub fn left_eigenvectors(&self) -> &DMatrix<f64> {
        &self.left
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.stationary
    }

    /// Degrees `d^{(α)}` of the normalised kernel.
    pub fn degrees(&self) -> &DVector<f64> {
        &self.degrees
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    /// 1-based indices `l` with `λ_l` tied to `λ_{l+1}`.
    pub fn tied_eigenvalues(&self) -> &[usize] {
        &self.ties
    }

    pub fn select_dimension(&self, delta: f64, steps: u32) -> usize {
        if self.eigenvalues.first().is_some_and(|l| *l > 1.0 - 1e-6) {
            warn!(
                "lambda_1 = {} is within 1e-6 of 1; the graph is nearly disconnected",
                self.eigenvalues[0]
            );
        }
        select_dimension(&self.eigenvalues, delta, steps)
    }

    /// Diffusion map `Ψ_T` with `dim` coordinates `λ_l^T ψ_l`, `l = 1..dim`.
    pub fn embed(&self, steps: u32, dim: usize, method: Method) -> Result<Embedding> {
        let n = self.n_points();
        if dim == 0 || dim > n - 1 {
            return Err(Error::Dimension(format!(
                "embedding dimension must lie in 1..={} for {n} points, got {dim}",
                n - 1
            )));
        }
        let t = steps as i32;
        let scales: Vec<f64> = self.eigenvalues[..dim].iter().map(|l| l.powi(t)).collect();
        let coords = DMatrix::from_fn(n, dim, |i, l| scales[l] * self.right[(i, l)]);
        Embedding::new(coords, method, self.eigenvalues[..dim].to_vec(), None)
    }

    /// Rows `i` of `P^T` by repeated vector-matrix products.
    fn transition_row_power(&self, i: usize, steps: u32) -> DVector<f64> {
        let n = self.n_points();
        let mut row = DVector::zeros(n);
        row[i] = 1.0;
        for _ in 0..steps {
            row = self.transition.tr_mul(&row);
        }
        row
    }

    /// `D_T(i, j)² = Σ_k (P^T_ik - P^T_jk)² / π_k`, computed from powers of
    /// the transition matrix rather than from the spectrum.
    pub fn diffusion_distance(&self, i: usize, j: usize, steps: u32) -> Result<f64> {
        let n = self.n_points();
        if i >= n || j >= n {
            return Err(Error::Dimension(format!(
                "point index out of range for {n} points"
            )));
        }
        if i == j {
            return Ok(0.0);
        }
        let ri = self.transition_row_power(i, steps);
        let rj = self.transition_row_power(j, steps);
        let d2: f64 = (0..n)
            .map(|k| (ri[k] - rj[k]).powi(2) / self.stationary[k])
            .sum();
        Ok(d2.sqrt())
    }

    /// `sqrt(Σ_{l=1}^{dim} λ_l^{2T} (ψ_l(i) - ψ_l(j))²)`.
    pub fn spectral_distance(&self, i: usize, j: usize, steps: u32, dim: usize) -> f64 {
        let t = 2 * steps as i32;
        (0..dim.min(self.eigenvalues.len()))
            .map(|l| self.eigenvalues[l].powi(t) * (self.right[(i, l)] - self.right[(j, l)]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ_{l≥0} λ_l ψ_l φ_lᵀ`, which should reproduce the transition matrix.
    pub fn reconstruct_transition(&self) -> DMatrix<f64> {
        let n = self.n_points();
        let mut p = DMatrix::zeros(n, n);
        // trivial term: ψ_0 φ_0ᵀ = 1 πᵀ up to λ_0 and the sign convention
        p += &self.psi0 * self.stationary.transpose() * (self.lambda0 * self.psi0.mean().signum());
        for l in 0..self.eigenvalues.len() {
            p += self.right.column(l) * self.left.column(l).transpose() * self.eigenvalues[l];
        }
        p
    }

    /// Serializable summary keeping the first `dim` right eigenvectors.
    pub fn export(&self, dim: usize) -> ModelExport {
        let dim = dim.min(self.eigenvalues.len());
        ModelExport {
            lambda0: self.lambda0,
            eigenvalues: self.eigenvalues.clone(),
            stationary: self.stationary.iter().copied().collect(),
            right_eigenvectors: (0..dim)
                .map(|l| self.right.column(l).iter().copied().collect())
                .collect(),
        }
    }
}

/// JSON form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelExport {
    pub lambda0: f64,
    pub eigenvalues: Vec<f64>,
    pub stationary: Vec<f64>,
    /// `right_eigenvectors[l]` is `ψ_{l+1}`.
    pub right_eigenvectors: Vec<Vec<f64>>,
}

/// A fitted diffusion map: the spectrum and the embedding it induces.
#[derive(Debug, Clone)]
pub struct DiffusionFit {
    pub model: DiffusionModel,
    pub embedding: Embedding,
    pub params: DiffusionParams,
    pub dim: usize,
}

/// Run α-normalisation, spectral decomposition and embedding on an arbitrary
/// nonnegative symmetric affinity matrix.
pub fn fit_affinity(k: &DMatrix<f64>, params: &DiffusionParams, method: Method) -> Result<DiffusionFit> {
    let k_alpha = alpha_normalize(k, params.alpha)?;
    let model = spectral_decompose(&k_alpha)?;
    let dim = match params.truncation {
        Truncation::Dimension(l) => l,
        Truncation::Precision(delta) => model.select_dimension(delta, params.steps),
    };
    let embedding = model.embed(params.steps, dim, method)?;
    Ok(DiffusionFit {
        model,
        embedding,
        params: *params,
        dim,
    })
}

/// Diffusion map of a kernel matrix.
pub fn fit_kernel(kernel: &KernelMatrix, params: &DiffusionParams, method: Method) -> Result<DiffusionFit> {
    fit_affinity(kernel.entries(), params, method)
}

/// Functional diffusion map: kernel on L² (or L¹) distances of the curves.
pub fn functional_diffusion_map(
    ds: &FunctionalDataset,
    kernel: &KernelSpec,
    params: &DiffusionParams,
) -> Result<DiffusionFit> {
    let k = build_kernel_matrix(kernel, ds)?;
    let mut fit = fit_kernel(&k, params, Method::Fdm)?;
    fit.embedding = with_labels(fit.embedding, ds)?;
    Ok(fit)
}

/// Multivariate diffusion map on the raw sample values (or coefficients),
/// i.e. unit quadrature weights.
pub fn diffusion_map(
    ds: &FunctionalDataset,
    kernel: &KernelSpec,
    params: &DiffusionParams,
) -> Result<DiffusionFit> {
    let raw = ds.to_multivariate()?;
    let k = build_kernel_matrix(kernel, &raw)?;
    let mut fit = fit_kernel(&k, params, Method::Dm)?;
    fit.embedding = with_labels(fit.embedding, ds)?;
    Ok(fit)
}

fn with_labels(e: Embedding, ds: &FunctionalDataset) -> Result<Embedding> {
    Embedding::new(
        e.coordinates().clone(),
        e.method(),
        e.eigenvalues().to_vec(),
        ds.labels().cloned(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(a: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, a, a, 1.0])
    }

    #[test]
    fn alpha_zero_is_identity() {
        let k = two_by_two(0.3);
        assert_eq!(alpha_normalize(&k, 0.0).unwrap(), k);
    }

    #[test]
    fn alpha_one_on_ones() {
        let k = DMatrix::from_element(2, 2, 1.0);
        let ka = alpha_normalize(&k, 1.0).unwrap();
        assert!(ka.iter().all(|v| (*v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn alpha_one_hand_computed() {
        let ka = alpha_normalize(&two_by_two(0.5), 1.0).unwrap();
        assert!((ka[(0, 1)] - 0.5 / (1.5 * 1.5)).abs() < 1e-15);
        assert!((ka[(0, 1)] - 0.2222222222222222).abs() < 1e-15);
    }

    #[test]
    fn transition_of_two_points() {
        let a = 0.4;
        let p = transition_matrix(&two_by_two(a)).unwrap();
        assert!((p[(0, 0)] - 1.0 / (1.0 + a)).abs() < 1e-15);
        assert!((p[(0, 1)] - a / (1.0 + a)).abs() < 1e-15);
        let uniform = transition_matrix(&DMatrix::from_element(4, 4, 1.0)).unwrap();
        assert!(uniform.iter().all(|v| *v == 0.25));
    }

    #[test]
    fn zero_row_rejected() {
        let k = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(transition_matrix(&k), Err(Error::ZeroDegree { row: 0 })));
    }

    #[test]
    fn stationary_from_degrees() {
        let pi = stationary_distribution(&two_by_two(0.7)).unwrap();
        assert_eq!(pi.as_slice(), &[0.5, 0.5]);
        // degrees (1, 3)
        let k = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 2.5]);
        let pi = stationary_distribution(&k).unwrap();
        assert!((pi[0] - 0.25).abs() < 1e-15 && (pi[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn two_point_spectrum() {
        // characteristic polynomial of [[1, a], [a, 1]] / (1 + a): roots 1 and (1 - a)/(1 + a)
        let a = 0.3;
        let m = spectral_decompose(&two_by_two(a)).unwrap();
        assert!((m.lambda0() - 1.0).abs() < 1e-12);
        assert!((m.eigenvalues()[0] - (1.0 - a) / (1.0 + a)).abs() < 1e-12);
        assert!(m.psi0_spread() < 1e-12);
    }

    #[test]
    fn dimension_selection() {
        assert_eq!(select_dimension(&[0.9, 0.5, 0.1], 0.5, 1), 2);
        assert_eq!(select_dimension(&[0.5; 4], 0.5, 3), 4);
        assert_eq!(select_dimension(&[0.9, 0.89, 0.5], 1.0 - 1e-12, 1), 1);
    }

    #[test]
    fn params_validated() {
        assert!(DiffusionParams::with_dim(1.5, 1, 2).is_err());
        assert!(DiffusionParams::with_dim(0.5, 0, 2).is_err());
        assert!(DiffusionParams::with_dim(0.5, 1, 0).is_err());
        assert!(DiffusionParams::new(0.5, 1, Truncation::Precision(1.0)).is_err());
        assert!(DiffusionParams::new(0.5, 1, Truncation::Precision(0.1)).is_ok());
    }

    #[test]
    fn embed_range_checked() {
        let m = spectral_decompose(&two_by_two(0.3)).unwrap();
        assert!(m.embed(1, 2, Method::Fdm).is_err());
        let e = m.embed(1, 1, Method::Fdm).unwrap();
        assert_eq!(e.dim(), 1);
    }
}
