//! Reading and writing curve files.
//!
//! Sampled curves are stored one per CSV row with no header, optionally
//! preceded by a label cell; the grid lives in a JSON sidecar
//! `<stem>.grid.json` next to the CSV. Basis datasets are a single JSON
//! document `{"basis": ..., "coefficients": [[...]], "labels": [...]}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdata::{BasisDataset, BasisSystem, DiscretizedDataset, FunctionalDataset, Labels, SamplingGrid};

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// `data/x.csv` -> `data/x.grid.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv.with_file_name(format!("{stem}.grid.json"))
}

pub fn write_grid<W: Write>(grid: &SamplingGrid, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, grid)?;
    Ok(())
}

pub fn read_grid<R: Read>(r: R) -> Result<SamplingGrid> {
    Ok(serde_json::from_reader(r)?)
}

/// Curve rows only; the grid is not written.
pub fn write_curves<W: Write>(ds: &DiscretizedDataset, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let values = ds.values();
    for i in 0..ds.n_curves() {
        let mut rec = Vec::with_capacity(values.ncols() + 1);
        if let Some(l) = ds.labels() {
            rec.push(l.text(i));
        }
        rec.extend(values.row(i).iter().map(|v| format_float(*v)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Parse curve rows. With a known grid of `M` points a row of `M + 1` cells
/// carries a leading label; without one, a non-numeric first cell marks a
/// label column and the grid defaults to `0, 1, ..., M - 1`. Labels read
/// from CSV are always categorical.
pub fn read_curves<R: Read>(r: R, grid: Option<SamplingGrid>) -> Result<DiscretizedDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut records = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row: row + 1,
            message: e.to_string(),
        })?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(Error::InvalidData("curve file contains no rows".into()));
    };
    let width = first.len();
    let has_label = match &grid {
        Some(g) if width == g.len() + 1 => true,
        Some(g) if width == g.len() => false,
        Some(g) => {
            return Err(Error::Parse {
                row: 1,
                message: format!("{width} cells for a {}-point grid", g.len()),
            })
        }
        None => first[0].parse::<f64>().is_err(),
    };
    let m = width - usize::from(has_label);
    if m == 0 {
        return Err(Error::Parse {
            row: 1,
            message: "row has no sample values".into(),
        });
    }

    let mut values = Vec::with_capacity(records.len() * m);
    let mut labels = Vec::new();
    for (row, rec) in records.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::Parse {
                row: row + 1,
                message: format!("expected {width} cells, found {}", rec.len()),
            });
        }
        let mut cells = rec.iter();
        if has_label {
            labels.push(cells.next().unwrap_or_default().to_string());
        }
        for (col, cell) in cells.enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: row + 1,
                message: format!("column {}: `{cell}` is not a number", col + 1 + usize::from(has_label)),
            })?;
            values.push(v);
        }
    }
    let n = records.len();
    let grid = match grid {
        Some(g) => g,
        None => SamplingGrid::uniform(0.0, (m - 1) as f64, m).or_else(|_| SamplingGrid::unit(m))?,
    };
    let labels = has_label.then_some(Labels::Categorical(labels));
    DiscretizedDataset::new(grid, DMatrix::from_row_slice(n, m, &values), labels)
}

/// Write `path` and its grid sidecar.
pub fn save_curves_csv(ds: &DiscretizedDataset, path: &Path) -> Result<()> {
    write_curves(ds, BufWriter::new(File::create(path)?))?;
    write_grid(ds.grid(), BufWriter::new(File::create(sidecar_path(path))?))
}

/// Load a curve CSV, using `grid_sidecar` if given, else `<stem>.grid.json`
/// when it exists.
pub fn load_curves_csv(path: &Path, grid_sidecar: Option<&Path>) -> Result<DiscretizedDataset> {
    let sidecar = match grid_sidecar {
        Some(p) => Some(p.to_path_buf()),
        None => Some(sidecar_path(path)).filter(|p| p.exists()),
    };
    let grid = match sidecar {
        Some(p) => Some(read_grid(BufReader::new(File::open(p)?))?),
        None => None,
    };
    read_curves(BufReader::new(File::open(path)?), grid)
}

#[derive(Serialize, Deserialize)]
struct BasisFile {
    basis: BasisSystem,
    coefficients: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Labels>,
}

pub fn write_basis_json<W: Write>(ds: &BasisDataset, w: W) -> Result<()> {
    let doc = BasisFile {
        basis: ds.basis().clone(),
        coefficients: ds
            .coefficients()
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        labels: ds.labels().cloned(),
    };
    serde_json::to_writer_pretty(w, &doc)?;
    Ok(())
}

pub fn read_basis_json<R: Read>(r: R) -> Result<BasisDataset> {
    let doc: BasisFile = serde_json::from_reader(r)?;
    let k = doc.basis.n_basis();
    let n = doc.coefficients.len();
    if let Some(row) = doc.coefficients.iter().position(|c| c.len() != k) {
        return Err(Error::Parse {
            row: row + 1,
            message: format!(
                "{} coefficients for a {k}-function basis",
                doc.coefficients[row].len()
            ),
        });
    }
    let flat: Vec<f64> = doc.coefficients.into_iter().flatten().collect();
    BasisDataset::new(doc.basis, DMatrix::from_row_slice(n, k, &flat), doc.labels)
}

pub fn save_basis_json(ds: &BasisDataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_basis_json(ds, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_basis_json(path: &Path) -> Result<BasisDataset> {
    read_basis_json(BufReader::new(File::open(path)?))
}

/// `.json` files are basis datasets, anything else is a curve CSV.
pub fn load_dataset(path: &Path) -> Result<FunctionalDataset> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        Ok(load_basis_json(path)?.into())
    } else {
        Ok(load_curves_csv(path, None)?.into())
    }
}

/// Inverse of [`load_dataset`]: basis datasets go to JSON, sampled ones to
/// CSV plus sidecar.
pub fn save_dataset(ds: &FunctionalDataset, path: &Path) -> Result<()> {
    match ds {
        FunctionalDataset::Discretized(d) => save_curves_csv(d, path),
        FunctionalDataset::Basis(b) => save_basis_json(b, path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("a/b/x.csv")), PathBuf::from("a/b/x.grid.json"));
    }

    #[test]
    fn label_column_detected_without_grid() {
        let ds = read_curves("aa,1,2,3\nsh,4,5,6\n".as_bytes(), None).unwrap();
        assert_eq!(ds.grid().points(), &[0.0, 1.0, 2.0]);
        assert_eq!(ds.labels().unwrap().text(1), "sh");
    }

    #[test]
    fn numeric_label_needs_grid() {
        let g = SamplingGrid::uniform(0.0, 1.0, 2).unwrap();
        let ds = read_curves("1.5,1,2\n1.0,3,4\n".as_bytes(), Some(g)).unwrap();
        assert_eq!(ds.values().ncols(), 2);
        assert_eq!(ds.labels().unwrap().text(0), "1.5");
    }

    #[test]
    fn ragged_row_reports_index() {
        match read_curves("1,2,3\n4,5\n".as_bytes(), None) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_cell_reports_index() {
        match read_curves("1,2,3\n4,5,6\n7,x,9\n".as_bytes(), None) {
            Err(Error::Parse { row, message }) => {
                assert_eq!(row, 3);
                assert!(message.contains('x'));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_curve_loads() {
        let ds = read_curves("1,2,3,4\n".as_bytes(), None).unwrap();
        assert_eq!(ds.n_curves(), 1);
    }
}
