//! Radial kernels on functional data and dense kernel matrix assembly.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdata::{l1_distance, l2_distance, pairwise_distances, FunctionalDataset, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// `exp(-‖x - y‖²_{L²} / (2σ²))`
    Gaussian,
    /// `exp(-‖x - y‖_{L¹} / σ²)`
    Laplacian,
}

impl KernelFamily {
    /// Distance the family is built on.
    pub fn metric(self) -> Metric {
        match self {
            KernelFamily::Gaussian => Metric::L2,
            KernelFamily::Laplacian => Metric::L1,
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Laplacian => "laplacian",
        })
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "rbf" => Ok(KernelFamily::Gaussian),
            "laplacian" => Ok(KernelFamily::Laplacian),
            other => Err(Error::InvalidParameter(format!("unknown kernel family `{other}`"))),
        }
    }
}

/// Kernel family plus bandwidth σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidBandwidth(bandwidth));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }

    pub fn laplacian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Laplacian, bandwidth)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Kernel value for a distance of the family's metric. The Laplacian
    /// kernel divides by σ², not σ.
    pub fn from_distance(&self, d: f64) -> f64 {
        let s2 = self.bandwidth * self.bandwidth;
        match self.family {
            KernelFamily::Gaussian => (-d * d / (2.0 * s2)).exp(),
            KernelFamily::Laplacian => (-d / s2).exp(),
        }
    }
}

/// Kernel value between curves `i` and `j` of `ds`.
pub fn kernel_value(spec: &KernelSpec, ds: &FunctionalDataset, i: usize, j: usize) -> Result<f64> {
    let d = match spec.family {
        KernelFamily::Gaussian => l2_distance(ds, i, j)?,
        KernelFamily::Laplacian => l1_distance(ds, i, j)?,
    };
    Ok(spec.from_distance(d))
}

/// Dense symmetric kernel matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    entries: DMatrix<f64>,
    spec: KernelSpec,
}

impl KernelMatrix {
    /// Kernel matrix from a precomputed distance matrix of the family's
    /// metric. Only the upper triangle is read; the lower one is mirrored.
    pub fn from_distances(spec: KernelSpec, distances: &DMatrix<f64>) -> Result<Self> {
        let n = distances.nrows();
        if n != distances.ncols() {
            return Err(Error::Dimension(format!(
                "distance matrix must be square, got {}x{}",
                n,
                distances.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::Dimension(format!(
                "a kernel matrix needs at least 2 curves, got {n}"
            )));
        }
        let mut k = DMatrix::from_element(n, n, 1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = spec.from_distance(distances[(i, j)]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        Ok(KernelMatrix { entries: k, spec })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    /// Plain CSV dump, one matrix row per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for r in self.entries.row_iter() {
            let line: Vec<String> = r.iter().map(|v| crate::io::format_float(*v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Evaluate the kernel over all pairs of curves.
pub fn build_kernel_matrix(spec: &KernelSpec, ds: &FunctionalDataset) -> Result<KernelMatrix> {
    if ds.n_curves() < 2 {
        return Err(Error::Dimension(format!(
            "a kernel matrix needs at least 2 curves, got {}",
            ds.n_curves()
        )));
    }
    let d = pairwise_distances(ds, spec.family.metric());
    KernelMatrix::from_distances(*spec, &d)
}
