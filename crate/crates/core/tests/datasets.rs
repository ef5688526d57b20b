
use approx::assert_abs_diff_eq;
use fdmap::datasets::{
    cauchy_grid, gen_cauchy, gen_moons_functional, gen_phoneme_like, gen_swiss_roll_functional, make_moons,
    phoneme_class_counts, CauchyConfig, RollScaling, SwissRollConfig,
};
use fdmap::fdata::{smooth_to_basis, FunctionalDataset, Labels, SamplingGrid};
use fdmap::io::{
    load_basis_json, load_curves_csv, load_dataset, read_curves, save_basis_json, save_curves_csv, save_dataset,
    sidecar_path,
};
use fdmap::Error;

#[test]
fn cauchy_curves_integrate_below_their_amplitude() {
    let cfg = CauchyConfig::default();
    let ds = gen_cauchy(&cfg).unwrap();
    assert_eq!(ds.n_curves(), 50);
    assert_eq!(ds.grid().len(), 300);
    let w = ds.grid().weights();
    for i in 0..50 {
        let a = if i < 25 { 1.0 } else { 1.5 };
        let integral: f64 = ds.values().row(i).iter().zip(w).map(|(v, w)| v * w).sum();
        assert!(integral > 0.0 && integral <= a, "curve {i}: {integral}");
    }
    let (classes, names) = ds.labels().unwrap().class_indices().unwrap();
    assert_eq!(names, vec!["1.0", "1.5"]);
    assert_eq!(classes.iter().filter(|c| **c == 1).count(), 25);
}

#[test]
fn cauchy_grid_is_strictly_increasing() {
    let g = cauchy_grid();
    assert!(g.points().windows(2).all(|w| w[1] > w[0]));
    let total: f64 = g.weights().iter().sum();
    assert_abs_diff_eq!(total, g.span(), epsilon = 1e-12);
}

#[test]
fn moons_survive_a_smoothing_round_trip() {
    let ds = gen_moons_functional(100, 0.05, 3).unwrap();
    let grid = SamplingGrid::uniform(0.0, 1.0, 200).unwrap();
    let sampled = ds.sample(&grid).unwrap();
    let back = smooth_to_basis(&sampled, ds.basis()).unwrap();
    assert!((back.coefficients() - ds.coefficients()).amax() < 1e-6);
}

#[test]
fn moons_are_balanced_and_seeded() {
    let (a, ya) = make_moons(201, 0.1, 7).unwrap();
    let (b, yb) = make_moons(201, 0.1, 7).unwrap();
    let (c, _) = make_moons(201, 0.1, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(ya, yb);
    assert_ne!(a, c);
    assert_eq!(ya.iter().filter(|y| **y == 0).count(), 100);
    let (clean, y) = make_moons(40, 0.0, 1).unwrap();
    for i in 0..40 {
        let (x0, x1) = (clean[(i, 0)], clean[(i, 1)]);
        let r = if y[i] == 0 {
            (x0 * x0 + x1 * x1).sqrt()
        } else {
            ((x0 - 1.0).powi(2) + (x1 - 0.5).powi(2)).sqrt()
        };
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn swiss_roll_is_sorted_and_standardized() {
    let ds = gen_swiss_roll_functional(&SwissRollConfig::default()).unwrap();
    let Some(Labels::Continuous(t)) = ds.labels() else {
        panic!("roll parameter should be a continuous label");
    };
    assert!(t.windows(2).all(|w| w[1] >= w[0]));
    let lo = 1.5 * std::f64::consts::PI;
    assert!(t.iter().all(|v| *v >= lo && *v <= 3.0 * lo));
    for col in ds.coefficients().column_iter() {
        let mean = col.mean();
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 1.0, epsilon = 1e-12);
    }
    let raw = gen_swiss_roll_functional(&SwissRollConfig {
        scaling: RollScaling::Raw,
        ..SwissRollConfig::default()
    })
    .unwrap();
    assert!(raw.coefficients().column(1).max() > 2.0);
}

#[test]
fn phoneme_like_has_requested_classes() {
    let counts = phoneme_class_counts(300);
    let sizes: Vec<usize> = counts.iter().map(|(_, c)| *c).collect();
    assert_eq!(sizes, vec![46, 72, 47, 77, 58]);
    let ds = gen_phoneme_like(&counts, 9).unwrap();
    assert_eq!(ds.n_curves(), 300);
    assert_eq!(ds.grid().len(), 256);
    assert_eq!(ds, gen_phoneme_like(&counts, 9).unwrap());
    assert!(ds.values().iter().all(|v| v.is_finite()));
}

#[test]
fn curve_csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cauchy.csv");
    let ds = gen_cauchy(&CauchyConfig::default()).unwrap();
    save_curves_csv(&ds, &path).unwrap();
    assert!(sidecar_path(&path).exists());
    assert_eq!(load_curves_csv(&path, None).unwrap(), ds);
    let FunctionalDataset::Discretized(again) = load_dataset(&path).unwrap() else {
        panic!("csv should load as sampled curves");
    };
    assert_eq!(again, ds);
}

#[test]
fn basis_json_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roll.json");
    let ds = gen_swiss_roll_functional(&SwissRollConfig {
        n: 40,
        ..SwissRollConfig::default()
    })
    .unwrap();
    save_basis_json(&ds, &path).unwrap();
    assert_eq!(load_basis_json(&path).unwrap(), ds);
    let moons: FunctionalDataset = gen_moons_functional(30, 0.1, 2).unwrap().into();
    let path = dir.path().join("moons.json");
    save_dataset(&moons, &path).unwrap();
    assert_eq!(load_dataset(&path).unwrap(), moons);
}

#[test]
fn headerless_csv_without_sidecar() {
    let text = "a,1,2,3\nb,4,5,6\n";
    let ds = read_curves(text.as_bytes(), None).unwrap();
    assert_eq!(ds.grid().points(), &[0.0, 1.0, 2.0]);
    assert_eq!(ds.labels().unwrap().text(1), "b");
    let plain = read_curves("1,2\n3,4\n".as_bytes(), None).unwrap();
    assert!(plain.labels().is_none());
}

#[test]
fn malformed_rows_report_their_line() {
    match read_curves("1,2,3\n4,x,6\n".as_bytes(), None) {
        Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
    match read_curves("1,2,3\n4,5\n".as_bytes(), None) {
        Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn generated_sets_are_reproducible() {
    let a = gen_moons_functional(50, 0.2, 11).unwrap();
    assert_eq!(a, gen_moons_functional(50, 0.2, 11).unwrap());
    let cfg = SwissRollConfig {
        noise: 0.3,
        seed: 5,
        ..SwissRollConfig::default()
    };
    assert_eq!(gen_swiss_roll_functional(&cfg).unwrap(), gen_swiss_roll_functional(&cfg).unwrap());
}
