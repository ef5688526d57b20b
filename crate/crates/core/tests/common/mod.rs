#![allow(dead_code)]

use fdmap::fdata::{
    BasisDataset, BasisSystem, DiscretizedDataset, FunctionalDataset, Labels, Metric, SamplingGrid,
};
use fdmap::kernels::{KernelFamily, KernelSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigensolver, descending order. Deliberately unrelated to
/// the library's solver so it can serve as an oracle.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        if off.sqrt() < 1e-15 * a.norm().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|x, y| a[(*y, *y)].total_cmp(&a[(*x, *x)]));
    let values = order.iter().map(|i| a[(*i, *i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Sorted random points on `[0, span]` with both end points included.
pub fn random_grid(r: &mut ChaCha8Rng, m: usize, span: f64) -> SamplingGrid {
    let mut t: Vec<f64> = (0..m - 2).map(|_| r.random::<f64>() * span).collect();
    t.push(0.0);
    t.push(span);
    t.sort_by(f64::total_cmp);
    t.dedup();
    SamplingGrid::trapezoidal(t).unwrap()
}

/// Random smooth curves (a few sines with random phases) on a random grid.
pub fn random_discretized(r: &mut ChaCha8Rng, n: usize, m: usize) -> DiscretizedDataset {
    let span = 1.0 + r.random::<f64>();
    let grid = random_grid(r, m, span);
    let m = grid.len();
    let mut values = DMatrix::zeros(n, m);
    for i in 0..n {
        let a: [f64; 3] = [r.random::<f64>() - 0.5, r.random::<f64>() - 0.5, r.random::<f64>() - 0.5];
        let ph: f64 = r.random::<f64>() * 6.0;
        for (j, t) in grid.points().iter().enumerate() {
            values[(i, j)] = a[0] * (3.0 * t + ph).sin() + a[1] * (5.0 * t).cos() + a[2] * t;
        }
    }
    DiscretizedDataset::new(grid, values, None).unwrap()
}

pub fn random_basis_dataset(r: &mut ChaCha8Rng, n: usize) -> BasisDataset {
    let basis = if r.random::<bool>() {
        BasisSystem::bspline((0.0, 1.0 + r.random::<f64>()), 4, 6).unwrap()
    } else {
        BasisSystem::fourier((0.0, 2.0), 5).unwrap()
    };
    let k = basis.n_basis();
    let c = DMatrix::from_fn(n, k, |_, _| r.random::<f64>() - 0.5);
    BasisDataset::new(basis, c, None).unwrap()
}

pub fn random_dataset(r: &mut ChaCha8Rng, n: usize) -> FunctionalDataset {
    if r.random::<bool>() {
        let m = 20 + r.random_range(0..30);
        random_discretized(r, n, m).into()
    } else {
        random_basis_dataset(r, n).into()
    }
}

/// Median off-diagonal entry of a distance matrix.
pub fn median_distance(d: &DMatrix<f64>) -> f64 {
    let n = d.nrows();
    let mut v: Vec<f64> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| d[(i, j)])
        .collect();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// A kernel whose bandwidth is on the scale of the data, so the graph is
/// neither empty nor complete.
pub fn scaled_kernel(r: &mut ChaCha8Rng, ds: &FunctionalDataset, family: KernelFamily) -> KernelSpec {
    let d = fdmap::fdata::pairwise_distances(ds, family.metric());
    let med = median_distance(&d).max(1e-6);
    let factor = 0.5 + 1.5 * r.random::<f64>();
    let sigma = match family {
        KernelFamily::Gaussian => med * factor,
        KernelFamily::Laplacian => (med * factor).sqrt(),
    };
    KernelSpec::new(family, sigma).unwrap()
}

pub fn metric_of(family: KernelFamily) -> Metric {
    family.metric()
}

/// Flip `b`'s columns so each agrees in sign with `a`'s; returns the max
/// absolute difference afterwards.
pub fn max_diff_up_to_sign(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst: f64 = 0.0;
    for l in 0..a.ncols() {
        let plus = (a.column(l) - b.column(l)).amax();
        let minus = (a.column(l) + b.column(l)).amax();
        worst = worst.max(plus.min(minus));
    }
    worst
}

pub fn categorical(names: &[&str]) -> Labels {
    Labels::Categorical(names.iter().map(|s| s.to_string()).collect())
}
