mod common;

use fdmap::fdata::{DiscretizedDataset, FunctionalDataset, SamplingGrid};
use fdmap::isomap::{classical_mds, geodesic_distances, isomap, isomap_from_distances, IsomapParams};
use fdmap::score::spearman;
use fdmap::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn euclidean(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.nrows();
    DMatrix::from_fn(n, n, |i, j| (points.row(i) - points.row(j)).norm())
}

/// Floyd-Warshall over the same union-symmetrised k-NN graph.
fn floyd(d: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = d.nrows();
    let mut g = DMatrix::from_element(n, n, f64::INFINITY);
    for i in 0..n {
        g[(i, i)] = 0.0;
        let mut order: Vec<usize> = (0..n).filter(|j| *j != i).collect();
        order.sort_by(|a, b| d[(i, *a)].total_cmp(&d[(i, *b)]).then(a.cmp(b)));
        for &j in order.iter().take(k) {
            g[(i, j)] = d[(i, j)];
            g[(j, i)] = d[(i, j)];
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = g[(i, m)] + g[(m, j)];
                if via < g[(i, j)] {
                    g[(i, j)] = via;
                }
            }
        }
    }
    g
}

#[test]
fn curves_along_a_line_keep_their_order() {
    let grid = SamplingGrid::uniform(0.0, 1.0, 30).unwrap();
    let shifts: Vec<f64> = (0..25).map(|i| ((i * 7) % 25) as f64 * 0.1).collect();
    let values = DMatrix::from_fn(25, 30, |i, j| (grid.points()[j] * 4.0).sin() + shifts[i]);
    let ds: FunctionalDataset = DiscretizedDataset::new(grid, values, None).unwrap().into();
    let fit = isomap(&ds, &IsomapParams::new(4, 1).unwrap()).unwrap();
    let rho = spearman(&fit.embedding.axis(0), &shifts).unwrap();
    assert!((rho.abs() - 1.0).abs() < 1e-12);
    assert!(fit.stress < 1e-10);
}

#[test]
fn flat_rectangle_is_recovered() {
    let mut pts = Vec::new();
    for a in 0..20 {
        for b in 0..8 {
            pts.extend([a as f64 * 0.25, b as f64 * 0.25]);
        }
    }
    let n = pts.len() / 2;
    let d = euclidean(&DMatrix::from_row_slice(n, 2, &pts));
    let fit = isomap_from_distances(&d, &IsomapParams::new(8, 2).unwrap()).unwrap();
    assert!(fit.stress <= 0.1, "stress {}", fit.stress);
}

#[test]
fn mds_reproduces_euclidean_configuration() {
    let mut r = common::rng(40);
    let p = DMatrix::from_fn(12, 3, |_, _| r.random::<f64>());
    let d = euclidean(&p);
    let (coords, values) = classical_mds(&d, 3).unwrap();
    assert!((euclidean(&coords) - &d).amax() < 1e-10);
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn disconnected_graph_is_an_error() {
    let mut pts = vec![];
    for i in 0..5 {
        pts.extend([i as f64, 0.0]);
        pts.extend([100.0 + i as f64, 0.0]);
    }
    let d = euclidean(&DMatrix::from_row_slice(10, 2, &pts));
    match geodesic_distances(&d, 2) {
        Err(Error::DisconnectedGraph { components }) => assert_eq!(components, 2),
        other => panic!("expected a disconnected graph, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn geodesics_match_floyd_warshall(seed in 0u64..100_000, n in 6usize..30, k in 3usize..8) {
        let mut r = common::rng(seed);
        let p = DMatrix::from_fn(n, 2, |_, _| r.random::<f64>());
        let d = euclidean(&p);
        let oracle = floyd(&d, k);
        match geodesic_distances(&d, k) {
            Ok(g) => {
                prop_assert!((g.clone() - &oracle).amax() < 1e-12);
                prop_assert_eq!(&g, &g.transpose());
                for i in 0..n {
                    for j in 0..n {
                        prop_assert!(g[(i, j)] + 1e-12 >= d[(i, j)]);
                    }
                }
            }
            Err(Error::DisconnectedGraph { .. }) => {
                prop_assert!(oracle.iter().any(|v| v.is_infinite()));
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn permutation_equivariance(seed in 0u64..100_000) {
        let mut r = common::rng(seed);
        let p = DMatrix::from_fn(15, 2, |_, _| r.random::<f64>());
        let mut perm: Vec<usize> = (0..15).collect();
        for i in (1..15).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let q = DMatrix::from_fn(15, 2, |i, j| p[(perm[i], j)]);
        let params = IsomapParams::new(14, 2).unwrap();
        let a = isomap_from_distances(&euclidean(&p), &params).unwrap();
        let b = isomap_from_distances(&euclidean(&q), &params).unwrap();
        let pa = DMatrix::from_fn(15, 2, |i, j| a.embedding.coordinates()[(perm[i], j)]);
        prop_assert!(common::max_diff_up_to_sign(&pa, b.embedding.coordinates()) < 1e-9);
    }
}
