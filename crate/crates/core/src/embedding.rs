use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdata::Labels;
use crate::io::format_float;

/// Which method produced an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fdm,
    Dm,
    Fpca,
    Isomap,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fdm => "fdm",
            Method::Dm => "dm",
            Method::Fpca => "fpca",
            Method::Isomap => "isomap",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fdm" => Ok(Method::Fdm),
            "dm" => Ok(Method::Dm),
            "fpca" => Ok(Method::Fpca),
            "isomap" => Ok(Method::Isomap),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// `N x L` coordinates with one eigenvalue per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    coordinates: DMatrix<f64>,
    method: Method,
    eigenvalues: Vec<f64>,
    labels: Option<Labels>,
}

impl Embedding {
    pub fn new(
        coordinates: DMatrix<f64>,
        method: Method,
        eigenvalues: Vec<f64>,
        labels: Option<Labels>,
    ) -> Result<Self> {
        if coordinates.ncols() == 0 {
            return Err(Error::Dimension("an embedding needs at least one axis".into()));
        }
        if eigenvalues.len() != coordinates.ncols() {
            return Err(Error::Dimension(format!(
                "{} eigenvalues for {} axes",
                eigenvalues.len(),
                coordinates.ncols()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != coordinates.nrows() {
                return Err(Error::InvalidData(format!(
                    "{} labels for {} embedded points",
                    l.len(),
                    coordinates.nrows()
                )));
            }
        }
        Ok(Embedding {
            coordinates,
            method,
            eigenvalues,
            labels,
        })
    }

    pub fn coordinates(&self) -> &DMatrix<f64> {
        &self.coordinates
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn n_points(&self) -> usize {
        self.coordinates.nrows()
    }

    pub fn dim(&self) -> usize {
        self.coordinates.ncols()
    }

    pub fn axis(&self, l: usize) -> Vec<f64> {
        self.coordinates.column(l).iter().copied().collect()
    }

    /// Euclidean distance between embedded points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        crate::linalg::row_distance(&self.coordinates, i, j)
    }

    /// Keep the first `l` axes.
    pub fn truncated(&self, l: usize) -> Result<Self> {
        if l == 0 || l > self.dim() {
            return Err(Error::Dimension(format!(
                "cannot keep {l} of {} axes",
                self.dim()
            )));
        }
        Embedding::new(
            self.coordinates.columns(0, l).into_owned(),
            self.method,
            self.eigenvalues[..l].to_vec(),
            self.labels.clone(),
        )
    }

    /// CSV with header `index,label,coord_1..coord_L`; the label cell is
    /// empty for unlabeled data.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["index".to_string(), "label".to_string()];
        header.extend((1..=self.dim()).map(|l| format!("coord_{l}")));
        out.write_record(&header)?;
        for i in 0..self.n_points() {
            let mut rec = vec![
                i.to_string(),
                self.labels.as_ref().map(|l| l.text(i)).unwrap_or_default(),
            ];
            rec.extend(self.coordinates.row(i).iter().map(|v| format_float(*v)));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let e = Embedding::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]),
            Method::Fdm,
            vec![0.9, 0.5],
            Some(Labels::Categorical(vec!["a".into(), "b".into()])),
        )
        .unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,label,coord_1,coord_2");
        assert!(lines[1].starts_with("0,a,1.0000000000000000e0,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn shape_checks() {
        assert!(Embedding::new(DMatrix::zeros(3, 0), Method::Dm, vec![], None).is_err());
        assert!(Embedding::new(DMatrix::zeros(3, 2), Method::Dm, vec![1.0], None).is_err());
    }
}
