//! Functional diffusion maps and companion manifold methods for curve data.
//!
//! Curves are held as samples on a grid or as coefficients in a basis
//! ([`fdata`]). Pairwise L² (or L¹) distances honour the representation
//! through quadrature weights or the basis Gram matrix, and feed
//!
//! * [`diffusion`]: diffusion maps built on a radial [`kernels`] kernel,
//! * [`fpca`]: functional principal component analysis,
//! * [`isomap`]: k-NN graph geodesics plus classical MDS.
//!
//! [`datasets`] generates the synthetic benchmarks, [`score`] and
//! [`gridsearch`] evaluate embeddings, and [`io`] reads and writes curve
//! files.
//!
//! ```
//! use fdmap::datasets::{gen_moons_functional};
//! use fdmap::diffusion::{functional_diffusion_map, DiffusionParams};
//! use fdmap::kernels::KernelSpec;
//!
//! let ds = gen_moons_functional(60, 0.0, 1).unwrap().into();
//! let fit = functional_diffusion_map(
//!     &ds,
//!     &KernelSpec::gaussian(0.2).unwrap(),
//!     &DiffusionParams::with_dim(0.5, 1, 2).unwrap(),
//! )
//! .unwrap();
//! assert_eq!(fit.embedding.coordinates().shape(), (60, 2));
//! ```

pub mod datasets;
pub mod diffusion;
pub mod embedding;
mod error;
pub mod fdata;
pub mod fpca;
pub mod gridsearch;
pub mod io;
pub mod isomap;
pub mod kernels;
pub mod linalg;
pub mod score;

pub use embedding::{Embedding, Method};
pub use error::{Error, Result};
