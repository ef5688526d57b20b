use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fdmap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdmap"))
        .args(args)
        .current_dir(dir)
        .env_remove("FDMAP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = fdmap(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn extract() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/phoneme_extract.csv")
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_cauchy_writes_fifty_curves() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "cauchy"]);
    let text = fs::read_to_string(tmp.path().join("cauchy.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.split(',').count() == 301));
    assert!(tmp.path().join("cauchy.grid.json").exists());
    let m = manifest(&tmp.path().join("cauchy.manifest.json"));
    assert_eq!(m["command"], "generate");
}

#[test]
fn generate_is_byte_deterministic() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "moons", "--n", "200", "--seed", "7", "--out", "a.json"]);
    ok(tmp.path(), &["generate", "moons", "--n", "200", "--seed", "7", "--out", "b.json"]);
    assert_eq!(
        fs::read(tmp.path().join("a.json")).unwrap(),
        fs::read(tmp.path().join("b.json")).unwrap()
    );
    ok(tmp.path(), &["generate", "swissroll", "--points", "50", "--out", "roll.csv"]);
    let first = fs::read_to_string(tmp.path().join("roll.csv")).unwrap();
    assert_eq!(first.lines().count(), 300);
}

#[test]
fn unknown_dataset_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = fdmap(tmp.path(), &["generate", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("possible values"));
}

#[test]
fn embed_fdm_on_cauchy() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "cauchy"]);
    ok(
        tmp.path(),
        &["embed", "fdm", "--data", "cauchy.csv", "--kernel", "gaussian", "--sigma", "0.1", "--alpha", "0.0"],
    );
    let text = fs::read_to_string(tmp.path().join("fdm_embedding.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,label,coord_1,coord_2"));
    assert_eq!(lines.count(), 50);
    let m = manifest(&tmp.path().join("fdm_embedding.manifest.json"));
    assert_eq!(m["results"]["eigenvalues"].as_array().unwrap().len(), 2);
    assert_eq!(m["arguments"]["sigma"], 0.1);
}

#[test]
fn embed_fpca_gives_two_score_columns() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "moons"]);
    ok(tmp.path(), &["embed", "fpca", "--data", "moons.json", "--dim", "2", "--out", "scores.csv"]);
    let text = fs::read_to_string(tmp.path().join("scores.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 4));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn embed_isomap_on_phoneme_extract() {
    let tmp = TempDir::new().unwrap();
    let data = extract();
    ok(
        tmp.path(),
        &[
            "embed", "isomap", "--data", data.to_str().unwrap(), "--truncate", "100", "--bspline", "9",
            "--neighbors", "10", "--dim", "2", "--out", "iso.csv",
        ],
    );
    let m = manifest(&tmp.path().join("iso.manifest.json"));
    assert!(m["results"]["stress"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["results"]["n_points"], 300);
}

#[test]
fn missing_hyperparameters_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "cauchy"]);
    let out = fdmap(tmp.path(), &["embed", "fdm", "--data", "cauchy.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--sigma"));
    let out = fdmap(tmp.path(), &["embed", "isomap", "--data", "cauchy.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--neighbors"));
}

#[test]
fn exit_codes_distinguish_data_and_numeric_failures() {
    let tmp = TempDir::new().unwrap();
    let out = fdmap(tmp.path(), &["embed", "fpca", "--data", "missing.csv"]);
    assert_eq!(out.status.code(), Some(2));
    ok(tmp.path(), &["generate", "cauchy"]);
    let out = fdmap(tmp.path(), &["embed", "isomap", "--data", "cauchy.csv", "--neighbors", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("disconnected"));
}

#[test]
fn gridsearch_preset_is_exhaustive_and_repeatable() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "cauchy"]);
    ok(tmp.path(), &["gridsearch", "--data", "cauchy.csv", "--preset", "cauchy", "--out", "a.csv"]);
    ok(tmp.path(), &["gridsearch", "--data", "cauchy.csv", "--preset", "cauchy", "--out", "b.csv"]);
    let a = fs::read_to_string(tmp.path().join("a.csv")).unwrap();
    assert_eq!(a.lines().count(), 51);
    assert_eq!(a, fs::read_to_string(tmp.path().join("b.csv")).unwrap());
    let m = manifest(&tmp.path().join("a.manifest.json"));
    assert_eq!(m["results"]["timings"].as_array().unwrap().len(), 50);
}

#[test]
fn gridsearch_space_file_errors() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["generate", "cauchy"]);
    fs::write(tmp.path().join("bad.json"), "{\n  \"method\": \"fdm\",\n  \"sigmas\": [0.1,,]\n}\n").unwrap();
    let out = fdmap(tmp.path(), &["gridsearch", "--data", "cauchy.csv", "--space", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("row 3"));
    fs::write(tmp.path().join("empty.json"), r#"{"method": "fdm"}"#).unwrap();
    let out = fdmap(tmp.path(), &["gridsearch", "--data", "cauchy.csv", "--space", "empty.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fdmap(tmp.path(), &["gridsearch", "--data", "cauchy.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn default_output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fdmap"))
        .args(["generate", "phoneme-like", "--n", "30"])
        .current_dir(tmp.path())
        .env("FDMAP_OUT_DIR", tmp.path().join("runs"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("runs/phoneme-like.csv").exists());
    assert!(tmp.path().join("runs/phoneme-like.manifest.json").exists());
}
