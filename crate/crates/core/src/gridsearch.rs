//! Exhaustive hyperparameter sweeps scored by [`crate::score`].

use std::collections::HashMap;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{fit_kernel, DiffusionParams};
use crate::embedding::{Embedding, Method};
use crate::error::{Error, Result};
use crate::fdata::{pairwise_distances, FunctionalDataset};
use crate::io::format_float;
use crate::isomap::{isomap_from_distances, IsomapParams};
use crate::kernels::{KernelFamily, KernelMatrix, KernelSpec};
use crate::score::{score_embedding, Scorer};

fn default_steps() -> u32 {
    1
}

fn default_dim() -> usize {
    2
}

/// Cartesian grid of hyperparameters for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub method: Method,
    #[serde(default)]
    pub kernels: Vec<KernelFamily>,
    #[serde(default)]
    pub sigmas: Vec<f64>,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub neighbors: Vec<usize>,
    #[serde(default = "default_steps")]
    pub steps: u32,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

/// One point of a [`SearchSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub method: Method,
    pub kernel: Option<KernelFamily>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub neighbors: Option<usize>,
    pub steps: u32,
    pub dim: usize,
}

fn quarters() -> Vec<f64> {
    (0..=4).map(|k| k as f64 / 4.0).collect()
}

impl SearchSpace {
    /// Both kernels, `α ∈ {0, ¼, ½, ¾, 1}`, `σ ∈ {k/40 : 4 ≤ k ≤ 8}`.
    pub fn cauchy() -> Self {
        SearchSpace {
            method: Method::Fdm,
            kernels: vec![KernelFamily::Gaussian, KernelFamily::Laplacian],
            sigmas: (4..=8).map(|k| k as f64 / 40.0).collect(),
            alphas: quarters(),
            neighbors: vec![],
            steps: 1,
            dim: 2,
        }
    }

    /// Both kernels, `α ∈ {0, ¼, ½, ¾, 1}`, `σ ∈ {k/20 : 4 ≤ k ≤ 8}`.
    pub fn toy() -> Self {
        SearchSpace {
            sigmas: (4..=8).map(|k| k as f64 / 20.0).collect(),
            ..Self::cauchy()
        }
    }

    /// Isomap with `k ∈ {5, 10, 15, 20, 25}` neighbours.
    pub fn isomap() -> Self {
        SearchSpace {
            method: Method::Isomap,
            kernels: vec![],
            sigmas: vec![],
            alphas: vec![],
            neighbors: (1..=5).map(|k| 5 * k).collect(),
            steps: 1,
            dim: 2,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "cauchy" => Ok(Self::cauchy()),
            "toy" => Ok(Self::toy()),
            "isomap" => Ok(Self::isomap()),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset `{other}` (expected cauchy, toy or isomap)"
            ))),
        }
    }

    /// Parse a JSON space; syntax errors carry their line number.
    pub fn from_json(text: &str) -> Result<Self> {
        let space: SearchSpace = serde_json::from_str(text).map_err(|e| Error::Parse {
            row: e.line(),
            message: e.to_string(),
        })?;
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidParameter(m));
        if self.steps == 0 {
            return invalid("steps must be at least 1".into());
        }
        if self.dim == 0 {
            return invalid("dim must be at least 1".into());
        }
        match self.method {
            Method::Fdm | Method::Dm => {
                if self.kernels.is_empty() || self.sigmas.is_empty() || self.alphas.is_empty() {
                    return invalid(format!(
                        "a {} search needs nonempty kernels, sigmas and alphas",
                        self.method
                    ));
                }
                if let Some(s) = self.sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
                    return Err(Error::InvalidBandwidth(*s));
                }
                if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                    return invalid(format!("alpha {a} outside [0, 1]"));
                }
            }
            Method::Isomap => {
                if self.neighbors.is_empty() {
                    return invalid("an isomap search needs a nonempty neighbors list".into());
                }
                if self.neighbors.contains(&0) {
                    return invalid("neighbor counts must be at least 1".into());
                }
            }
            Method::Fpca => {
                return invalid("fpca has no hyperparameters to search".into());
            }
        }
        Ok(())
    }

    /// Every configuration, kernel-major then σ then α (or by neighbours).
    pub fn configurations(&self) -> Vec<Configuration> {
        let base = Configuration {
            method: self.method,
            kernel: None,
            sigma: None,
            alpha: None,
            neighbors: None,
            steps: self.steps,
            dim: self.dim,
        };
        match self.method {
            Method::Isomap => self
                .neighbors
                .iter()
                .map(|k| Configuration {
                    neighbors: Some(*k),
                    ..base
                })
                .collect(),
            Method::Fpca => vec![],
            Method::Fdm | Method::Dm => {
                let mut out = Vec::new();
                for k in &self.kernels {
                    for s in &self.sigmas {
                        for a in &self.alphas {
                            out.push(Configuration {
                                kernel: Some(*k),
                                sigma: Some(*s),
                                alpha: Some(*a),
                                ..base
                            });
                        }
                    }
                }
                out
            }
        }
    }

    pub fn len(&self) -> usize {
        self.configurations().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Outcome of one configuration.
#[derive(Debug, Clone)]
pub struct GridRow {
    pub rank: usize,
    /// Position in [`SearchSpace::configurations`].
    pub index: usize,
    pub config: Configuration,
    pub result: std::result::Result<f64, String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct GridResults {
    pub scorer: Scorer,
    /// Sorted by descending score; failed rows last in enumeration order.
    pub rows: Vec<GridRow>,
}

impl GridResults {
    pub fn best(&self) -> Option<&GridRow> {
        self.rows.first().filter(|r| r.result.is_ok())
    }

    /// Deterministic table: no timings.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "rank", "method", "kernel", "sigma", "alpha", "neighbors", "steps", "dim", "scorer",
            "score", "status", "message",
        ])?;
        let opt_f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        for r in &self.rows {
            let c = &r.config;
            let (score, status, message) = match &r.result {
                Ok(s) => (format_float(*s), "ok", String::new()),
                Err(m) => (String::new(), "failed", m.clone()),
            };
            out.write_record([
                r.rank.to_string(),
                c.method.to_string(),
                c.kernel.map(|k| k.to_string()).unwrap_or_default(),
                opt_f(c.sigma),
                opt_f(c.alpha),
                c.neighbors.map(|k| k.to_string()).unwrap_or_default(),
                c.steps.to_string(),
                c.dim.to_string(),
                self.scorer.to_string(),
                score,
                status.to_string(),
                message,
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Embed `ds` under one configuration, reusing precomputed distances.
fn embed_config(
    c: &Configuration,
    distances: &HashMap<KernelFamily, DMatrix<f64>>,
    l2: Option<&DMatrix<f64>>,
    ds: &FunctionalDataset,
) -> Result<Embedding> {
    let emb = match c.method {
        Method::Fdm | Method::Dm => {
            let family = c.kernel.expect("diffusion configurations carry a kernel");
            let spec = KernelSpec::new(family, c.sigma.unwrap_or(f64::NAN))?;
            let k = KernelMatrix::from_distances(spec, &distances[&family])?;
            let params = DiffusionParams::with_dim(c.alpha.unwrap_or(0.0), c.steps, c.dim)?;
            fit_kernel(&k, &params, c.method)?.embedding
        }
        Method::Isomap => {
            let params = IsomapParams::new(c.neighbors.unwrap_or(0), c.dim)?;
            let d = l2.expect("isomap searches precompute L2 distances");
            isomap_from_distances(d, &params)?.embedding
        }
        Method::Fpca => {
            return Err(Error::InvalidParameter("fpca has no hyperparameters to search".into()))
        }
    };
    Embedding::new(
        emb.coordinates().clone(),
        emb.method(),
        emb.eigenvalues().to_vec(),
        ds.labels().cloned(),
    )
}

/// Evaluate every configuration (in parallel) and rank by score.
pub fn run_grid(ds: &FunctionalDataset, space: &SearchSpace, scorer: Option<Scorer>) -> Result<GridResults> {
    space.validate()?;
    let labels = ds
        .labels()
        .ok_or_else(|| Error::ScorerMismatch("grid search needs a labelled dataset".into()))?;
    let scorer = scorer.unwrap_or_else(|| Scorer::default_for(labels));

    let source = match space.method {
        Method::Dm => ds.to_multivariate()?,
        _ => ds.clone(),
    };
    let mut distances = HashMap::new();
    for k in &space.kernels {
        distances
            .entry(*k)
            .or_insert_with(|| pairwise_distances(&source, k.metric()));
    }
    let l2 = (space.method == Method::Isomap)
        .then(|| pairwise_distances(&source, crate::fdata::Metric::L2));

    let configs = space.configurations();
    let mut rows: Vec<GridRow> = configs
        .par_iter()
        .enumerate()
        .map(|(index, c)| {
            let start = Instant::now();
            let result = embed_config(c, &distances, l2.as_ref(), ds)
                .and_then(|e| score_embedding(&e, scorer))
                .and_then(|s| {
                    if s.is_finite() {
                        Ok(s)
                    } else {
                        Err(Error::NumericFailure(format!("score is {s}")))
                    }
                })
                .map_err(|e| e.to_string());
            GridRow {
                rank: 0,
                index,
                config: *c,
                result,
                elapsed: start.elapsed(),
            }
        })
        .collect();

    rows.sort_by(|a, b| match (&a.result, &b.result) {
        (Ok(x), Ok(y)) => y.total_cmp(x).then(a.index.cmp(&b.index)),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => a.index.cmp(&b.index),
    });
    for (r, row) in rows.iter_mut().enumerate() {
        row.rank = r + 1;
    }
    Ok(GridResults { scorer, rows })
}
