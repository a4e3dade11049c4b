use std::path::Path;

use super::{CandidateSurface, Smoothness};
use crate::error::{Error, Result};

/// Tabulated surface on a rectangular `(u, v)` lattice with bilinear
/// interpolation. Evaluates to NaN outside the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct TableSurface {
    label: String,
    us: Vec<f64>,
    vs: Vec<f64>,
    /// Row-major, `values[i * vs.len() + j] = f(us[i], vs[j])`.
    values: Vec<f64>,
}

impl TableSurface {
    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&format!("table:{}", path.display()), &text)
    }

    /// Rows `u,v,f`; an optional header line is skipped.
    pub fn from_csv(label: &str, text: &str) -> Result<Self> {
        let bad = |reason: String| Error::Parse {
            what: "surface table",
            input: label.to_string(),
            reason,
        };
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(format!("line {}: expected 3 columns", lineno + 1)));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => rows.push((v[0], v[1], v[2])),
                Err(_) if rows.is_empty() && lineno == 0 => continue,
                Err(e) => return Err(bad(format!("line {}: {e}", lineno + 1))),
            }
        }
        let mut us: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut vs: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for axis in [&mut us, &mut vs] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        if us.len() < 2 || vs.len() < 2 {
            return Err(bad("need at least a 2x2 lattice".to_string()));
        }
        let mut values = vec![f64::NAN; us.len() * vs.len()];
        for (u, v, f) in rows {
            let i = us.partition_point(|&x| x < u);
            let j = vs.partition_point(|&x| x < v);
            values[i * vs.len() + j] = f;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(bad("lattice has missing nodes".to_string()));
        }
        Ok(Self {
            label: label.to_string(),
            us,
            vs,
            values,
        })
    }

    fn bracket(axis: &[f64], x: f64) -> Option<(usize, f64)> {
        if !(x >= axis[0] && x <= axis[axis.len() - 1]) {
            return None;
        }
        let i = axis.partition_point(|&a| a <= x).clamp(1, axis.len() - 1) - 1;
        Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
    }
}

impl CandidateSurface for TableSurface {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Continuous
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        let (Some((i, a)), Some((j, b))) = (Self::bracket(&self.us, u), Self::bracket(&self.vs, v))
        else {
            return f64::NAN;
        };
        let n = self.vs.len();
        let at = |i: usize, j: usize| self.values[i * n + j];
        (1.0 - a) * ((1.0 - b) * at(i, j) + b * at(i, j + 1))
            + a * ((1.0 - b) * at(i + 1, j) + b * at(i + 1, j + 1))
    }
}
