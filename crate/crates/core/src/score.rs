//! Scores for judging an embedding against known labels or a known
//! manifold parameter.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::fdata::Labels;
use crate::linalg::row_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    /// Mean silhouette of the class partition, in `[-1, 1]`.
    Silhouette,
    /// Leave-one-out 1-nearest-neighbour accuracy, in `[0, 1]`.
    Knn,
    /// `|ρ|` between the first coordinate and a continuous label.
    Spearman,
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scorer::Silhouette => "silhouette",
            Scorer::Knn => "knn",
            Scorer::Spearman => "spearman",
        })
    }
}

impl FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "silhouette" => Ok(Scorer::Silhouette),
            "knn" | "1nn" | "nn" => Ok(Scorer::Knn),
            "spearman" => Ok(Scorer::Spearman),
            other => Err(Error::InvalidParameter(format!("unknown scorer `{other}`"))),
        }
    }
}

impl Scorer {
    /// Silhouette for class labels, Spearman for a continuous parameter.
    pub fn default_for(labels: &Labels) -> Scorer {
        match labels {
            Labels::Categorical(_) => Scorer::Silhouette,
            Labels::Continuous(_) => Scorer::Spearman,
        }
    }
}

fn check_len(coords: &DMatrix<f64>, n: usize) -> Result<()> {
    if coords.nrows() != n {
        return Err(Error::ScorerMismatch(format!(
            "{n} labels for {} points",
            coords.nrows()
        )));
    }
    if n < 2 {
        return Err(Error::ScorerMismatch("scoring needs at least 2 points".into()));
    }
    Ok(())
}

/// Mean silhouette width; points in singleton classes contribute 0.
pub fn silhouette(coords: &DMatrix<f64>, classes: &[usize]) -> Result<f64> {
    let n = classes.len();
    check_len(coords, n)?;
    let k = classes.iter().max().map_or(0, |m| m + 1);
    let sizes = (0..k).map(|c| classes.iter().filter(|x| **x == c).count()).collect::<Vec<_>>();
    let occupied = sizes.iter().filter(|s| **s > 0).count();
    if occupied < 2 || occupied >= n {
        return Err(Error::ScorerMismatch(format!(
            "silhouette needs between 2 and n - 1 classes, got {occupied}"
        )));
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = classes[i];
        if sizes[own] == 1 {
            continue;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[classes[j]] += row_distance(coords, i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|c| *c != own && sizes[*c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}

/// Leave-one-out 1-NN accuracy (ties go to the lower index).
pub fn nn_accuracy(coords: &DMatrix<f64>, classes: &[usize]) -> Result<f64> {
    let n = classes.len();
    check_len(coords, n)?;
    let hits = (0..n)
        .filter(|&i| {
            let mut best = (f64::INFINITY, usize::MAX);
            for j in (0..n).filter(|j| *j != i) {
                let d = row_distance(coords, i, j);
                if d < best.0 {
                    best = (d, j);
                }
            }
            classes[best.1] == classes[i]
        })
        .count();
    Ok(hits as f64 / n as f64)
}

/// Mean 1-NN accuracy over `shuffles` random permutations of the labels.
pub fn shuffled_nn_baseline(coords: &DMatrix<f64>, classes: &[usize], shuffles: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm = classes.to_vec();
    let mut acc = 0.0;
    for _ in 0..shuffles.max(1) {
        perm.shuffle(&mut rng);
        acc += nn_accuracy(coords, &perm)?;
    }
    Ok(acc / shuffles.max(1) as f64)
}

/// Ranks starting at 1, ties get their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|a, b| x[*a].total_cmp(&x[*b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        let r = (start + end + 1) as f64 / 2.0;
        for k in &idx[start..end] {
            ranks[*k] = r;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::ScorerMismatch(format!(
            "Spearman needs two equally long samples of at least 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Whether some threshold on `values` puts the two classes on opposite
/// sides with no errors.
pub fn threshold_separable(values: &[f64], classes: &[usize]) -> bool {
    let range = |c: usize| {
        values
            .iter()
            .zip(classes)
            .filter(|(_, k)| **k == c)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v)))
    };
    let (lo0, hi0) = range(0);
    let (lo1, hi1) = range(1);
    hi0 < lo1 || hi1 < lo0
}

/// Score an embedding using its own labels.
pub fn score_embedding(emb: &Embedding, scorer: Scorer) -> Result<f64> {
    let labels = emb
        .labels()
        .ok_or_else(|| Error::ScorerMismatch("embedding has no labels to score against".into()))?;
    match (scorer, labels) {
        (Scorer::Spearman, Labels::Continuous(t)) => Ok(spearman(&emb.axis(0), t)?.abs()),
        (Scorer::Spearman, Labels::Categorical(_)) => Err(Error::ScorerMismatch(
            "Spearman scoring needs a continuous label".into(),
        )),
        (Scorer::Silhouette | Scorer::Knn, Labels::Continuous(_)) => Err(Error::ScorerMismatch(
            format!("{scorer} scoring needs class labels"),
        )),
        (Scorer::Silhouette, l) => silhouette(emb.coordinates(), &l.class_indices()?.0),
        (Scorer::Knn, l) => nn_accuracy(emb.coordinates(), &l.class_indices()?.0),
    }
}
