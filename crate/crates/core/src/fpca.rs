//! Functional principal component analysis for sampled curves and for basis
//! expansions.
//!
//! Both variants diagonalise `W^{1/2} Σ W^{1/2}` where `Σ` is the sample
//! covariance of the centred values (or coefficients) and `W` is the metric:
//! the diagonal quadrature weights for sampled curves, the Gram matrix for a
//! basis. Components are returned in the original coordinates, `W^{-1/2} u_l`,
//! so they are `W`-orthonormal.

use nalgebra::{DMatrix, DVector};

use crate::embedding::{Embedding, Method};
use crate::error::{Error, Result};
use crate::fdata::{BasisDataset, BasisSystem, DiscretizedDataset, FunctionalDataset, SamplingGrid};
use crate::linalg::{metric_roots, orient, symmetric_eigen, symmetrize};

/// Relative eigenvalue floor for the square roots of the metric.
pub const METRIC_FLOOR: f64 = 1e-12;

/// Where the fitted components live.
#[derive(Debug, Clone, PartialEq)]
pub enum FpcaDomain {
    Grid(SamplingGrid),
    Basis(BasisSystem),
}

#[derive(Debug, Clone)]
pub struct FpcaModel {
    domain: FpcaDomain,
    mean: DVector<f64>,
    /// Column `l` is `ξ̃_l` (grid values) or `b_l` (coefficients).
    components: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    spectrum: Vec<f64>,
    metric: DMatrix<f64>,
}

fn check_dim(l: usize, n: usize, p: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(format!("FPCA needs at least 2 curves, got {n}")));
    }
    if l == 0 || l > n.min(p) {
        return Err(Error::Dimension(format!(
            "number of components must lie in 1..={} (N = {n}, {p} variables), got {l}",
            n.min(p)
        )));
    }
    Ok(())
}

fn column_mean(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.mean()))
}

fn center(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - mean[j])
}

/// Shared core: eigendecompose `A = W^{1/2} Σ W^{1/2}`, map the leading `l`
/// eigenvectors through `back` (i.e. `W^{-1/2}`) and fix signs.
fn fit_core(a: DMatrix<f64>, l: usize, back: impl Fn(&DVector<f64>) -> DVector<f64>) -> Result<(Vec<f64>, DMatrix<f64>, Vec<f64>)> {
    let eig = symmetric_eigen(symmetrize(a))?;
    let spectrum: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let p = eig.vectors.nrows();
    let mut components = DMatrix::zeros(p, l);
    for k in 0..l {
        let u = eig.vectors.column(k).into_owned();
        let mut xi: Vec<f64> = back(&u).iter().copied().collect();
        orient(&mut xi);
        components.set_column(k, &DVector::from_vec(xi));
    }
    Ok((spectrum[..l].to_vec(), components, spectrum))
}

/// FPCA of sampled curves with the grid's quadrature weights as metric.
pub fn fpca_discretized(ds: &DiscretizedDataset, l: usize) -> Result<FpcaModel> {
    let x = ds.values();
    let (n, m) = x.shape();
    check_dim(l, n, m)?;
    let w = ds.grid().weights();
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let mean = column_mean(x);
    let xc = center(x, &mean);
    let y = DMatrix::from_fn(n, m, |i, j| xc[(i, j)] * sqrt_w[j]);
    let a = y.transpose() * &y / n as f64;
    let (eigenvalues, components, spectrum) =
        fit_core(a, l, |u| DVector::from_fn(m, |j, _| u[j] / sqrt_w[j]))?;
    Ok(FpcaModel {
        domain: FpcaDomain::Grid(ds.grid().clone()),
        mean,
        components,
        eigenvalues,
        spectrum,
        metric: DMatrix::from_diagonal(&DVector::from_column_slice(w)),
    })
}

/// FPCA of basis coefficients with the Gram matrix as metric.
pub fn fpca_basis(ds: &BasisDataset, l: usize) -> Result<FpcaModel> {
    let c = ds.coefficients();
    let (n, k) = c.shape();
    check_dim(l, n, k)?;
    let gram = ds.basis().gram().clone();
    let (root, inv_root) = metric_roots(&gram, METRIC_FLOOR)?;
    let mean = column_mean(c);
    let cc = center(c, &mean);
    let sigma = cc.transpose() * &cc / n as f64;
    let a = &root * sigma * &root;
    let (eigenvalues, components, spectrum) = fit_core(a, l, |u| &inv_root * u)?;
    Ok(FpcaModel {
        domain: FpcaDomain::Basis(ds.basis().clone()),
        mean,
        components,
        eigenvalues,
        spectrum,
        metric: gram,
    })
}

/// Dispatch on the representation.
pub fn fpca(ds: &FunctionalDataset, l: usize) -> Result<FpcaModel> {
    match ds {
        FunctionalDataset::Discretized(d) => fpca_discretized(d, l),
        FunctionalDataset::Basis(b) => fpca_basis(b, l),
    }
}

/// Scores of `ds` on the components of `model`.
pub fn fpca_scores(model: &FpcaModel, ds: &FunctionalDataset) -> Result<DMatrix<f64>> {
    model.scores(ds)
}

impl FpcaModel {
    pub fn domain(&self) -> &FpcaDomain {
        &self.domain
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    /// Eigenvalues of the retained components.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Every eigenvalue of the covariance operator, negatives clamped to 0.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Quadrature weights (as a diagonal matrix) or Gram matrix.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    fn total_variance(&self) -> f64 {
        self.spectrum.iter().sum()
    }

    /// `τ_l = λ_l / Σ_i λ_i` for the retained components.
    pub fn explained(&self) -> Vec<f64> {
        let total = self.total_variance();
        self.eigenvalues
            .iter()
            .map(|v| if total > 0.0 { v / total } else { 0.0 })
            .collect()
    }

    /// Running sums of [`explained`](Self::explained).
    pub fn cumulative_explained(&self) -> Vec<f64> {
        self.explained()
            .iter()
            .scan(0.0, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect()
    }

    fn raw_matrix<'a>(&self, ds: &'a FunctionalDataset) -> Result<&'a DMatrix<f64>> {
        match (&self.domain, ds) {
            (FpcaDomain::Grid(g), FunctionalDataset::Discretized(d)) => {
                if d.grid().points() != g.points() {
                    return Err(Error::RepresentationMismatch(
                        "dataset grid differs from the grid the model was fitted on".into(),
                    ));
                }
                Ok(d.values())
            }
            (FpcaDomain::Basis(b), FunctionalDataset::Basis(d)) => {
                if d.basis().kind() != b.kind() || d.basis().domain() != b.domain() {
                    return Err(Error::RepresentationMismatch(
                        "dataset basis differs from the basis the model was fitted on".into(),
                    ));
                }
                Ok(d.coefficients())
            }
            _ => Err(Error::RepresentationMismatch(
                "model and dataset use different representations".into(),
            )),
        }
    }

    /// `θ_li = ⟨ξ_l, x_i - x̄⟩`, an `N x L` matrix.
    pub fn scores(&self, ds: &FunctionalDataset) -> Result<DMatrix<f64>> {
        let x = self.raw_matrix(ds)?;
        let xc = center(x, &self.mean);
        Ok(xc * &self.metric * &self.components)
    }

    /// `x̄ + Σ_l θ_li ξ_l` for the first `scores.ncols()` components, in the
    /// model's representation (grid values or coefficients).
    pub fn reconstruct(&self, scores: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let l = scores.ncols();
        if l > self.n_components() {
            return Err(Error::Dimension(format!(
                "{l} score columns for {} components",
                self.n_components()
            )));
        }
        let mut out = scores * self.components.columns(0, l).transpose();
        for mut row in out.row_iter_mut() {
            row += self.mean.transpose();
        }
        Ok(out)
    }

    /// Component functions sampled on `grid`, one per row. Grid-based
    /// components are linearly interpolated.
    pub fn component_curves(&self, grid: &SamplingGrid) -> Result<DMatrix<f64>> {
        let l = self.n_components();
        match &self.domain {
            FpcaDomain::Basis(b) => {
                let phi = b.design_matrix(grid.points());
                Ok((phi * &self.components).transpose())
            }
            FpcaDomain::Grid(g) => {
                if grid.start() < g.start() || grid.end() > g.end() {
                    return Err(Error::InvalidParameter(
                        "requested grid extends beyond the fitted grid".into(),
                    ));
                }
                let src = g.points();
                Ok(DMatrix::from_fn(l, grid.len(), |k, j| {
                    interpolate(src, self.components.column(k).as_slice(), grid.points()[j])
                }))
            }
        }
    }

    /// FPCA scores as an embedding (labels copied from `ds`).
    pub fn embed(&self, ds: &FunctionalDataset) -> Result<Embedding> {
        Embedding::new(
            self.scores(ds)?,
            Method::Fpca,
            self.eigenvalues.clone(),
            ds.labels().cloned(),
        )
    }
}

fn interpolate(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let k = xs.partition_point(|x| *x <= t);
    if k == 0 {
        return ys[0];
    }
    if k >= xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    let s = (t - x0) / (x1 - x0);
    ys[k - 1] * (1.0 - s) + ys[k] * s
}

/// Fit `l` components and return the training scores as an embedding.
pub fn fpca_embed(ds: &FunctionalDataset, l: usize) -> Result<(FpcaModel, Embedding)> {
    let model = fpca(ds, l)?;
    let emb = model.embed(ds)?;
    Ok((model, emb))
}
