//! Functional data containers and their L² geometry.
//!
//! A sample of curves is held either as values on a shared grid
//! ([`DiscretizedDataset`]) or as coefficients in a truncated basis
//! ([`BasisDataset`]); [`FunctionalDataset`] wraps both and is what the
//! embedding methods consume.

mod basis;
mod dataset;
mod distance;
mod grid;
mod smooth;

pub use basis::{
    gram_matrix, BasisKind, BasisSystem, ClosedFormFn, DEFAULT_FINE_GRID_POINTS,
    GRAM_QUADRATURE_POINTS,
};
pub use dataset::{BasisDataset, DiscretizedDataset, FunctionalDataset, Labels};
pub use distance::{
    basis_l1, basis_l2, grid_l1, grid_l2, l1_between, l1_distance, l2_between, l2_distance,
    pairwise_distances, Metric,
};
pub use grid::{linspace, trapezoidal_weights, SamplingGrid};
pub use smooth::smooth_to_basis;
