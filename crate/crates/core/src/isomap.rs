//! Isomap on functional data: k-nearest-neighbour graph over L² distances,
//! geodesics by Dijkstra, classical MDS.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, Method};
use crate::error::{Error, Result};
use crate::fdata::{pairwise_distances, FunctionalDataset, Metric};
use crate::linalg::{orient, row_distance, symmetric_eigen, symmetrize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsomapParams {
    n_neighbors: usize,
    dim: usize,
}

impl IsomapParams {
    pub fn new(n_neighbors: usize, dim: usize) -> Result<Self> {
        if n_neighbors == 0 {
            return Err(Error::InvalidParameter("n_neighbors must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be at least 1".into()));
        }
        Ok(IsomapParams { n_neighbors, dim })
    }

    pub fn n_neighbors(&self) -> usize {
        self.n_neighbors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Debug, Clone)]
pub struct IsomapFit {
    pub embedding: Embedding,
    /// All-pairs shortest-path lengths on the neighbourhood graph.
    pub geodesics: DMatrix<f64>,
    /// `sqrt(Σ (‖y_i - y_j‖ - g_ij)² / Σ g_ij²)` over pairs `i < j`.
    pub stress: f64,
}

/// Adjacency lists of the union-symmetrised k-NN graph.
fn knn_graph(d: &DMatrix<f64>, k: usize) -> Vec<Vec<(usize, f64)>> {
    let n = d.nrows();
    let k = k.min(n - 1);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| d[(i, a)].total_cmp(&d[(i, b)]).then(a.cmp(&b)));
        for &j in &others[..k] {
            adj[i].push((j, d[(i, j)]));
            adj[j].push((i, d[(i, j)]));
        }
    }
    for list in &mut adj {
        list.sort_by_key(|e| e.0);
        list.dedup_by_key(|e| e.0);
    }
    adj
}

fn count_components(adj: &[Vec<(usize, f64)>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
    dist
}

/// Geodesic distance matrix of the k-NN graph built on `d`.
pub fn geodesic_distances(d: &DMatrix<f64>, n_neighbors: usize) -> Result<DMatrix<f64>> {
    let n = d.nrows();
    if n != d.ncols() || n < 2 {
        return Err(Error::Dimension(format!(
            "geodesics need a square distance matrix of at least 2 points, got {}x{}",
            n,
            d.ncols()
        )));
    }
    let adj = knn_graph(d, n_neighbors);
    let components = count_components(&adj);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    // Dijkstra from i and from j can differ in the last ulp; average them
    Ok(symmetrize(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
}

/// Classical MDS of a distance matrix: top `dim` eigenpairs of
/// `B = -½ H D² H`, coordinates `√λ_l v_l`.
pub fn classical_mds(g: &DMatrix<f64>, dim: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = g.nrows();
    if dim == 0 || dim > n {
        return Err(Error::Dimension(format!(
            "MDS dimension must lie in 1..={n}, got {dim}"
        )));
    }
    let sq = g.map(|v| v * v);
    let row_means: Vec<f64> = sq.row_iter().map(|r| r.mean()).collect();
    let col_means: Vec<f64> = sq.column_iter().map(|c| c.mean()).collect();
    let grand = sq.mean();
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - col_means[j] + grand)
    });
    let eig = symmetric_eigen(symmetrize(b))?;
    let top = eig.values[0].abs().max(f64::MIN_POSITIVE);
    if eig.values.last().is_some_and(|v| *v < -1e-8 * top) {
        warn!(
            "geodesic matrix is not Euclidean (smallest eigenvalue {:e}); negative eigenvalues clamped to 0",
            eig.values[n - 1]
        );
    }
    let values: Vec<f64> = eig.values[..dim].iter().map(|v| v.max(0.0)).collect();
    let mut coords = DMatrix::zeros(n, dim);
    for l in 0..dim {
        let mut v: Vec<f64> = eig.vectors.column(l).iter().copied().collect();
        orient(&mut v);
        let s = values[l].sqrt();
        for i in 0..n {
            coords[(i, l)] = s * v[i];
        }
    }
    Ok((coords, values))
}

fn normalized_stress(coords: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let e = row_distance(coords, i, j) - g[(i, j)];
            num += e * e;
            den += g[(i, j)] * g[(i, j)];
        }
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        0.0
    }
}

/// Isomap on a precomputed distance matrix.
pub fn isomap_from_distances(d: &DMatrix<f64>, params: &IsomapParams) -> Result<IsomapFit> {
    let geodesics = geodesic_distances(d, params.n_neighbors)?;
    let (coords, values) = classical_mds(&geodesics, params.dim)?;
    let stress = normalized_stress(&coords, &geodesics);
    let embedding = Embedding::new(coords, Method::Isomap, values, None)?;
    Ok(IsomapFit {
        embedding,
        geodesics,
        stress,
    })
}

/// Isomap with quadrature-weighted (or Gram) L² edge lengths.
pub fn isomap(ds: &FunctionalDataset, params: &IsomapParams) -> Result<IsomapFit> {
    let d = pairwise_distances(ds, Metric::L2);
    let mut fit = isomap_from_distances(&d, params)?;
    fit.embedding = Embedding::new(
        fit.embedding.coordinates().clone(),
        Method::Isomap,
        fit.embedding.eigenvalues().to_vec(),
        ds.labels().cloned(),
    )?;
    Ok(fit)
}

/// Just the embedding of [`isomap`].
pub fn isomap_embed(ds: &FunctionalDataset, params: &IsomapParams) -> Result<Embedding> {
    Ok(isomap(ds, params)?.embedding)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn line_geodesics_are_euclidean() {
        let d = line(8);
        let g = geodesic_distances(&d, 1).unwrap();
        assert!((g - d).amax() < 1e-12);
    }

    #[test]
    fn disconnected_graph_reports_components() {
        let mut d = line(6);
        for i in 0..3 {
            for j in 3..6 {
                d[(i, j)] = 100.0 + (i + j) as f64;
                d[(j, i)] = d[(i, j)];
            }
        }
        match geodesic_distances(&d, 1) {
            Err(Error::DisconnectedGraph { components }) => assert_eq!(components, 2),
            other => panic!("expected a disconnected graph, got {other:?}"),
        }
    }

    #[test]
    fn equilateral_triangle() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        let fit = isomap_from_distances(&d, &IsomapParams::new(2, 2).unwrap()).unwrap();
        let e = &fit.embedding;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((e.distance(i, j) - 1.0).abs() < 1e-8);
        }
        assert!(fit.stress < 1e-8);
    }

    #[test]
    fn params_validated() {
        assert!(IsomapParams::new(0, 2).is_err());
        assert!(IsomapParams::new(3, 0).is_err());
    }
}
