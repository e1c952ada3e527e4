use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Piecewise linear inverse distribution function `u ↦ w` of `W`.
///
/// The grid must start at `u = 0`, end at `u = 1`, and be strictly increasing
/// in both columns with every `w` inside `(0, 1)`. Strict monotonicity rules
/// out atoms, so the interpolated law is absolutely continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseCdfTable {
    u: Vec<f64>,
    w: Vec<f64>,
    source: Option<String>,
}

impl InverseCdfTable {
    pub fn new(u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidLaw(format!("inverse-CDF table: {msg}")));
        if u.len() != w.len() {
            return bad("columns differ in length".into());
        }
        if u.len() < 2 {
            return bad("need at least two rows".into());
        }
        if u[0] != 0.0 || *u.last().unwrap() != 1.0 {
            return bad("u column must run from 0 to 1".into());
        }
        for (i, pair) in u.windows(2).enumerate() {
            if !(pair[1] > pair[0]) {
                return bad(format!("u not strictly increasing at row {}", i + 1));
            }
        }
        for (i, pair) in w.windows(2).enumerate() {
            if !(pair[1] > pair[0]) {
                return bad(format!(
                    "w not strictly increasing at row {} (an atom of W)",
                    i + 1
                ));
            }
        }
        if !(w[0] > 0.0 && *w.last().unwrap() < 1.0) {
            return bad("w values must lie strictly inside (0, 1)".into());
        }
        Ok(Self { u, w, source: None })
    }

    /// Reads a two-column `u,w` CSV. A non-numeric first row is taken as a header.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut u = Vec::new();
        let mut w = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidLaw(format!(
                    "inverse-CDF table row {} has {} columns, expected 2",
                    i + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(a), Ok(b)) => {
                    u.push(a);
                    w.push(b);
                }
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::InvalidLaw(format!(
                        "inverse-CDF table row {} is not numeric",
                        i + 1
                    )))
                }
            }
        }
        Self::new(u, w)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut table = Self::from_reader(file)?;
        table.source = Some(path.display().to_string());
        Ok(table)
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn w_min(&self) -> f64 {
        self.w[0]
    }

    pub fn w_max(&self) -> f64 {
        *self.w.last().unwrap()
    }

    /// `w = Q(u)` by linear interpolation.
    pub fn quantile(&self, u: f64) -> f64 {
        interpolate(&self.u, &self.w, u)
    }

    /// `P{W ≤ y}`, the inverse of [`Self::quantile`].
    pub fn cdf(&self, y: f64) -> f64 {
        interpolate(&self.w, &self.u, y)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}
