//! Synthetic functional manifolds and the bundled phoneme-style extract.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdata::{
    linspace, BasisDataset, BasisSystem, ClosedFormFn, DiscretizedDataset, Labels, SamplingGrid,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(sd: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(format!("noise level {sd}: {e}")))
}

/// Grid of three 100-point partitions: `[-10, -5]`, the open `(-5, 5)` and
/// `[5, 10]`. The middle block is half as dense as the outer ones.
pub fn cauchy_grid() -> SamplingGrid {
    let mut t = linspace(-10.0, -5.0, 100);
    t.extend((1..=100).map(|k| -5.0 + k as f64 * 10.0 / 101.0));
    t.extend(linspace(5.0, 10.0, 100));
    SamplingGrid::trapezoidal(t).expect("fixed grid is valid")
}

/// `a / π · γ / ((t - x₀)² + γ²)`.
pub fn cauchy_density(t: f64, center: f64, gamma: f64, amplitude: f64) -> f64 {
    amplitude / PI * gamma / ((t - center).powi(2) + gamma * gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyConfig {
    pub n_per_class: usize,
    pub amplitudes: Vec<f64>,
    pub gamma: f64,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        CauchyConfig {
            n_per_class: 25,
            amplitudes: vec![1.0, 1.5],
            gamma: 1.0,
        }
    }
}

/// Cauchy densities centred on an even grid of `[-5, 5]`, one block of
/// `n_per_class` curves per amplitude, labelled by amplitude.
pub fn gen_cauchy(cfg: &CauchyConfig) -> Result<DiscretizedDataset> {
    if cfg.n_per_class == 0 || cfg.amplitudes.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one curve and one amplitude".into(),
        ));
    }
    if !(cfg.gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale gamma must be positive, got {}",
            cfg.gamma
        )));
    }
    let grid = cauchy_grid();
    let centers = if cfg.n_per_class == 1 {
        vec![0.0]
    } else {
        linspace(-5.0, 5.0, cfg.n_per_class)
    };
    let n = cfg.n_per_class * cfg.amplitudes.len();
    let mut values = DMatrix::zeros(n, grid.len());
    let mut labels = Vec::with_capacity(n);
    for (a_idx, a) in cfg.amplitudes.iter().enumerate() {
        for (c_idx, c) in centers.iter().enumerate() {
            let row = a_idx * cfg.n_per_class + c_idx;
            for (j, t) in grid.points().iter().enumerate() {
                values[(row, j)] = cauchy_density(*t, *c, cfg.gamma, *a);
            }
            labels.push(format!("{a:?}"));
        }
    }
    DiscretizedDataset::new(grid, values, Some(Labels::Categorical(labels)))
}

/// `sin(4x)` and `x² + 2x - 2` on `[0, 1]`.
pub fn moons_basis() -> BasisSystem {
    BasisSystem::closed_form(
        (0.0, 1.0),
        vec![
            ClosedFormFn::Sin { freq: 4.0 },
            ClosedFormFn::Polynomial {
                coefficients: vec![-2.0, 2.0, 1.0],
            },
        ],
    )
    .expect("fixed basis is valid")
}

/// `sin(4x)`, `cos(8x)`, `sin(12x)` on `[0, 1]`.
pub fn swiss_roll_basis() -> BasisSystem {
    BasisSystem::closed_form(
        (0.0, 1.0),
        vec![
            ClosedFormFn::Sin { freq: 4.0 },
            ClosedFormFn::Cos { freq: 8.0 },
            ClosedFormFn::Sin { freq: 12.0 },
        ],
    )
    .expect("fixed basis is valid")
}

/// Two interleaved half circles: `n / 2` on the upper unit half circle
/// (class `0`), the rest on the lower one shifted by `(1, -0.5)` (class `1`).
/// Rows are shuffled, then Gaussian noise of s.d. `noise` is added.
pub fn make_moons(n: usize, noise: f64, seed: u64) -> Result<(DMatrix<f64>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("moons need n >= 2, got {n}")));
    }
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut points: Vec<([f64; 2], usize)> = Vec::with_capacity(n);
    for a in linspace(0.0, PI, n_out.max(2)).into_iter().take(n_out) {
        points.push(([a.cos(), a.sin()], 0));
    }
    let inner = if n_in == 1 { vec![0.0] } else { linspace(0.0, PI, n_in) };
    for a in inner {
        points.push(([1.0 - a.cos(), 1.0 - a.sin() - 0.5], 1));
    }
    let mut r = rng(seed);
    points.shuffle(&mut r);
    let jitter = normal(noise.max(0.0))?;
    let mut c = DMatrix::zeros(n, 2);
    let mut y = Vec::with_capacity(n);
    for (i, (p, label)) in points.into_iter().enumerate() {
        for k in 0..2 {
            c[(i, k)] = p[k] + if noise > 0.0 { jitter.sample(&mut r) } else { 0.0 };
        }
        y.push(label);
    }
    Ok((c, y))
}

/// Moons used as coefficients of the `sin(4x)`, `x² + 2x - 2` basis.
pub fn gen_moons_functional(n: usize, noise: f64, seed: u64) -> Result<BasisDataset> {
    let (c, y) = make_moons(n, noise, seed)?;
    let labels = Labels::Categorical(y.iter().map(|l| l.to_string()).collect());
    BasisDataset::new(moons_basis(), c, Some(labels))
}

/// How Swiss Roll coordinates become coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RollScaling {
    /// Each coordinate column centred and divided by its (population) s.d.
    #[default]
    Standardized,
    /// Raw `(t cos t, h, t sin t)`.
    Raw,
}

impl std::str::FromStr for RollScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standardized" | "standardised" | "normalized" => Ok(RollScaling::Standardized),
            "raw" => Ok(RollScaling::Raw),
            other => Err(Error::InvalidParameter(format!("unknown scaling `{other}`"))),
        }
    }
}

/// Points `(t cos t, h, t sin t)` with `t ~ U[1.5π, 4.5π]`, `h ~ U[0, 21]`,
/// sorted by `t`. Returns the coordinates and `t`.
pub fn make_swiss_roll(n: usize, noise: f64, seed: u64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("swiss roll needs n >= 2, got {n}")));
    }
    let mut r = rng(seed);
    let t: Vec<f64> = (0..n).map(|_| 1.5 * PI * (1.0 + 2.0 * r.random::<f64>())).collect();
    let h: Vec<f64> = (0..n).map(|_| 21.0 * r.random::<f64>()).collect();
    let jitter = normal(noise.max(0.0))?;
    let mut rows: Vec<(f64, [f64; 3])> = (0..n)
        .map(|i| {
            let mut p = [t[i] * t[i].cos(), h[i], t[i] * t[i].sin()];
            if noise > 0.0 {
                for v in &mut p {
                    *v += jitter.sample(&mut r);
                }
            }
            (t[i], p)
        })
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let coords = DMatrix::from_fn(n, 3, |i, k| rows[i].1[k]);
    Ok((coords, rows.into_iter().map(|(t, _)| t).collect()))
}

fn standardize(m: &mut DMatrix<f64>) {
    let n = m.nrows() as f64;
    for mut col in m.column_iter_mut() {
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for v in col.iter_mut() {
            *v -= mean;
            if sd > 0.0 {
                *v /= sd;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwissRollConfig {
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    pub scaling: RollScaling,
}

impl Default for SwissRollConfig {
    fn default() -> Self {
        SwissRollConfig {
            n: 300,
            noise: 0.0,
            seed: 0,
            scaling: RollScaling::Standardized,
        }
    }
}

/// Swiss Roll coordinates as coefficients of `sin(4x)`, `cos(8x)`,
/// `sin(12x)`; the roll parameter `t` is the continuous label.
pub fn gen_swiss_roll_functional(cfg: &SwissRollConfig) -> Result<BasisDataset> {
    let (mut c, t) = make_swiss_roll(cfg.n, cfg.noise, cfg.seed)?;
    if cfg.scaling == RollScaling::Standardized {
        standardize(&mut c);
    }
    BasisDataset::new(swiss_roll_basis(), c, Some(Labels::Continuous(t)))
}

/// Class sizes of the full 1500-curve phoneme sample.
pub const PHONEME_FREQUENCIES: [(&str, usize); 5] =
    [("aa", 232), ("ao", 358), ("dcl", 234), ("iy", 387), ("sh", 289)];

/// Stratified class sizes for a sample of `n` curves (largest remainder,
/// ties to the earlier class).
pub fn phoneme_class_counts(n: usize) -> Vec<(String, usize)> {
    let total: usize = PHONEME_FREQUENCIES.iter().map(|(_, c)| c).sum();
    let mut counts: Vec<usize> = PHONEME_FREQUENCIES.iter().map(|(_, c)| c * n / total).collect();
    let mut rema: Vec<(usize, usize)> = PHONEME_FREQUENCIES
        .iter()
        .enumerate()
        .map(|(k, (_, c))| (k, c * n % total))
        .collect();
    rema.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let missing = n - counts.iter().sum::<usize>();
    for (k, _) in rema.into_iter().take(missing) {
        counts[k] += 1;
    }
    PHONEME_FREQUENCIES
        .iter()
        .zip(counts)
        .map(|((name, _), c)| (name.to_string(), c))
        .collect()
}

/// Level offset and `(centre kHz, height, width kHz)` formant bumps.
fn phoneme_template(class: &str) -> (f64, &'static [(f64, f64, f64)]) {
    match class {
        "aa" => (0.0, &[(0.75, 6.0, 0.12), (1.2, 5.0, 0.15), (2.6, 3.0, 0.2)]),
        "ao" => (0.0, &[(0.6, 6.0, 0.12), (0.95, 5.0, 0.15), (2.5, 3.0, 0.2)]),
        "dcl" => (-3.0, &[(0.2, 3.0, 0.15)]),
        "iy" => (0.0, &[(0.3, 5.0, 0.1), (2.3, 4.0, 0.15), (3.0, 4.0, 0.2)]),
        "sh" => (-3.0, &[(3.0, 7.0, 0.6), (4.5, 5.0, 0.8)]),
        _ => (0.0, &[]),
    }
}

/// Synthetic log-periodogram-like curves on 256 frequencies in `[0, 8]` kHz:
/// a falling spectral tilt plus class-specific formant bumps, with random
/// level, bump height and bump position per curve and white noise per
/// frequency. Classes follow `counts` in order.
pub fn gen_phoneme_like(counts: &[(String, usize)], seed: u64) -> Result<DiscretizedDataset> {
    let grid = SamplingGrid::uniform(0.0, 8.0, 256)?;
    let n: usize = counts.iter().map(|(_, c)| c).sum();
    if n == 0 {
        return Err(Error::InvalidParameter("no curves requested".into()));
    }
    let mut r = rng(seed);
    let z = normal(1.0)?;
    let mut values = DMatrix::zeros(n, grid.len());
    let mut labels = Vec::with_capacity(n);
    let mut row = 0;
    for (class, count) in counts {
        let (offset, bumps) = phoneme_template(class);
        for _ in 0..*count {
            let level = 10.0 + offset + 1.0 * z.sample(&mut r);
            let drawn: Vec<(f64, f64, f64)> = bumps
                .iter()
                .map(|(f, a, w)| {
                    let height = a * (1.0 + 0.15 * z.sample(&mut r));
                    let centre = f * (1.0 + 0.1 * z.sample(&mut r));
                    (centre, height, *w)
                })
                .collect();
            for (j, f) in grid.points().iter().enumerate() {
                let mut x = level - 0.8 * f;
                for (c, a, w) in &drawn {
                    x += a * (-(f - c).powi(2) / (2.0 * w * w)).exp();
                }
                values[(row, j)] = x + 2.0 * z.sample(&mut r);
            }
            labels.push(class.clone());
            row += 1;
        }
    }
    DiscretizedDataset::new(grid, values, Some(Labels::Categorical(labels)))
}

/// Seed used for the bundled extract.
pub const PHONEME_EXTRACT_SEED: u64 = 1500;

/// Path of the bundled 300-curve extract (CSV with a `.grid.json` sidecar).
pub fn phoneme_extract_path() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/phoneme_extract.csv"))
}

/// Load the bundled extract.
pub fn phoneme_extract() -> Result<DiscretizedDataset> {
    crate::io::load_curves_csv(phoneme_extract_path(), None)
}
