//! Non-anticipative functionals `F(t, X) = exp(int_0^t K(t,s) d(X_s - <X>_s / 2))`
//! built from deterministic kernels, their dual Stieltjes form, and
//! diagnostics for the regularity of `K` in `t`.
//!
//! Kernels are sampled onto a time grid as piecewise-constant functions of
//! `s`: `K(t_i, s) = K[i][k]` for `s` in `[s_k, s_{k+1})`, `k < i`, and zero
//! for `s >= t_i`. Every sum below is then exact.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{PathOnGrid, SemimartingalePath, TimeGrid};
use crate::stats::{fit_line, CompensatedSum};
use crate::surface::parse_args;

pub const DEFAULT_WEIERSTRASS_TERMS: usize = 12;

/// `v(t) = sum_{k < terms} 2^{-k/2} cos(2 pi 2^k t)`.
pub fn weierstrass(terms: usize) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |t: f64| {
        (0..terms)
            .map(|k| 2f64.powf(-(k as f64) / 2.0) * (std::f64::consts::TAU * 2f64.powi(k as i32) * t).cos())
            .sum()
    }
}

/// Kernel selector: `unit`, `triangular`, `exponential:<rate>`,
/// `rough-weierstrass:<terms>`, `table:<csv of t,s,K>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum KernelDef {
    Unit,
    Triangular,
    Exponential { rate: f64 },
    RoughWeierstrass { terms: usize },
    Table { path: PathBuf },
}

impl KernelDef {
    /// Resolves a table kernel from disk; other kernels are closed-form.
    pub fn resolve(&self) -> Result<ResolvedKernel> {
        Ok(match self {
            Self::Table { path } => ResolvedKernel::Table(Arc::new(TableKernel::from_csv_file(path)?)),
            other => ResolvedKernel::Closed(other.clone()),
        })
    }
}

impl FromStr for KernelDef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let bad = |reason: &str| Error::Parse {
            what: "kernel",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match name.trim() {
            "unit" => Ok(Self::Unit),
            "triangular" => Ok(Self::Triangular),
            "exponential" => match parse_args("kernel", s, args)?.as_slice() {
                [rate] => Ok(Self::Exponential { rate: *rate }),
                _ => Err(bad("expected one parameter rate")),
            },
            "rough-weierstrass" => match parse_args("kernel", s, args)?.as_slice() {
                [] => Ok(Self::RoughWeierstrass {
                    terms: DEFAULT_WEIERSTRASS_TERMS,
                }),
                [n] if *n >= 1.0 && n.fract() == 0.0 => Ok(Self::RoughWeierstrass { terms: *n as usize }),
                _ => Err(bad("expected a positive integer term count")),
            },
            "table" if !args.trim().is_empty() => Ok(Self::Table {
                path: PathBuf::from(args.trim()),
            }),
            _ => Err(bad("unknown kernel")),
        }
    }
}

impl fmt::Display for KernelDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unit => write!(f, "unit"),
            Self::Triangular => write!(f, "triangular"),
            Self::Exponential { rate } => write!(f, "exponential:{rate}"),
            Self::RoughWeierstrass { terms } => write!(f, "rough-weierstrass:{terms}"),
            Self::Table { path } => write!(f, "table:{}", path.display()),
        }
    }
}

impl TryFrom<String> for KernelDef {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<KernelDef> for String {
    fn from(def: KernelDef) -> Self {
        def.to_string()
    }
}

#[derive(Clone, Debug)]
pub enum ResolvedKernel {
    Closed(KernelDef),
    Table(Arc<TableKernel>),
}

impl ResolvedKernel {
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        match self {
            Self::Table(table) => table.eval(t, s),
            Self::Closed(def) => {
                if s >= t {
                    return 0.0;
                }
                match def {
                    KernelDef::Unit => 1.0,
                    KernelDef::Triangular => t - s,
                    KernelDef::Exponential { rate } => (-rate * (t - s)).exp(),
                    KernelDef::RoughWeierstrass { terms } => weierstrass(*terms)(t),
                    KernelDef::Table { .. } => unreachable!("tables are resolved on load"),
                }
            }
        }
    }

    pub fn sample(&self, grid: &TimeGrid) -> Result<KernelSpec> {
        KernelSpec::from_fn(*grid, |t, s| self.eval(t, s))
    }
}

/// Kernel tabulated on a `(t, s)` lattice, constant on lattice cells and
/// zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct TableKernel {
    ts: Vec<f64>,
    ss: Vec<f64>,
    values: Vec<f64>,
}

impl TableKernel {
    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&path.display().to_string(), &text)
    }

    /// Rows `t,s,K`; an optional header line is skipped. Missing lattice
    /// nodes are zero.
    pub fn from_csv(label: &str, text: &str) -> Result<Self> {
        let bad = |reason: String| Error::Parse {
            what: "kernel table",
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
            match fields.iter().map(|f| f.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>() {
                Ok(v) => rows.push((v[0], v[1], v[2])),
                Err(_) if rows.is_empty() && lineno == 0 => continue,
                Err(e) => return Err(bad(format!("line {}: {e}", lineno + 1))),
            }
        }
        if rows.is_empty() {
            return Err(bad("no rows".to_string()));
        }
        for &(t, s, k) in &rows {
            if s >= t && k != 0.0 {
                return Err(Error::KernelNotCausal { t, s, value: k });
            }
        }
        let mut ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ss: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for axis in [&mut ts, &mut ss] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        let mut values = vec![0.0; ts.len() * ss.len()];
        for (t, s, k) in rows {
            let i = ts.partition_point(|&x| x < t);
            let j = ss.partition_point(|&x| x < s);
            values[i * ss.len() + j] = k;
        }
        Ok(Self { ts, ss, values })
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        if s >= t {
            return 0.0;
        }
        let i = self.ts.partition_point(|&x| x <= t);
        let j = self.ss.partition_point(|&x| x <= s);
        if i == 0 || j == 0 {
            return 0.0;
        }
        self.values[(i - 1) * self.ss.len() + (j - 1)]
    }
}

/// A kernel sampled onto a grid: `rows[i][k] = K(t_i, s_k)` for `k < i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelSpec {
    grid: TimeGrid,
    rows: Vec<Vec<f64>>,
}

impl KernelSpec {
    /// Samples `k` at `(t_i, s_j)` for all `j < i`. Rejects `k` if it is
    /// nonzero on the diagonal `s = t`.
    pub fn from_fn(grid: TimeGrid, k: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut rows = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let t = grid.time(i);
            let diagonal = k(t, t);
            if diagonal != 0.0 {
                return Err(Error::KernelNotCausal { t, s: t, value: diagonal });
            }
            rows.push((0..i).map(|j| k(t, grid.time(j))).collect());
        }
        Ok(Self { grid, rows })
    }

    /// From a full `(n + 1) x n` table `dense[i][k] = K(t_i, s_k)`, which
    /// must vanish for `k >= i`.
    pub fn from_dense(grid: TimeGrid, dense: &[Vec<f64>]) -> Result<Self> {
        if dense.len() != grid.len() {
            return Err(Error::LengthMismatch {
                what: "kernel rows",
                expected: grid.len(),
                found: dense.len(),
            });
        }
        let mut rows = Vec::with_capacity(grid.len());
        for (i, row) in dense.iter().enumerate() {
            if row.len() != grid.n_steps() {
                return Err(Error::LengthMismatch {
                    what: "kernel columns",
                    expected: grid.n_steps(),
                    found: row.len(),
                });
            }
            if let Some(k) = (i..row.len()).find(|&k| row[k] != 0.0) {
                return Err(Error::KernelNotCausal {
                    t: grid.time(i),
                    s: grid.time(k),
                    value: row[k],
                });
            }
            rows.push(row[..i.min(row.len())].to_vec());
        }
        Ok(Self { grid, rows })
    }

    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            grid,
            rows: (0..grid.len()).map(|i| vec![0.0; i]).collect(),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// `K(t_i, s)` on the cell containing `s`.
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.rows[i].get(k).copied().unwrap_or(0.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { grid: self.grid, rows })
    }

    /// Total variation of `s -> K(t_i, s)` on `[0, T]`, including the jump
    /// to zero at `s = t_i`.
    pub fn variation(&self, i: usize) -> f64 {
        let row = &self.rows[i];
        let inner: f64 = row.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        inner + row.last().map_or(0.0, |v| v.abs())
    }

    fn index(&self, t: f64) -> Result<usize> {
        self.grid.index_of(t)
    }

    pub fn riesz_measure(&self) -> RieszMeasure {
        let jumps = self
            .rows
            .iter()
            .map(|row| {
                let mut out = Vec::with_capacity(row.len() + 1);
                let mut previous = 0.0;
                for &k in row {
                    out.push(previous - k);
                    previous = k;
                }
                out.push(previous);
                out
            })
            .collect();
        RieszMeasure { grid: self.grid, jumps }
    }
}

/// Dual measure `G(t_i, ds)` as jump masses at the grid points `s_0..=s_i`,
/// with `G(t, s) = -K(t, s)` for `s < t` and `G(t, s) = 0` for `s >= t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RieszMeasure {
    grid: TimeGrid,
    /// `jumps[i][k] = G(t_i, s_k) - G(t_i, s_k-)`, `k <= i`. Row 0 is `[0]`.
    jumps: Vec<Vec<f64>>,
}

impl RieszMeasure {
    pub fn jumps(&self, i: usize) -> &[f64] {
        &self.jumps[i]
    }

    pub fn total_variation(&self, i: usize) -> f64 {
        self.jumps[i].iter().map(|j| j.abs()).sum()
    }

    /// `G(t_i, s_k)` by accumulating jumps.
    pub fn cumulative(&self, i: usize, k: usize) -> f64 {
        let mut acc = CompensatedSum::default();
        for j in &self.jumps[i][..=k.min(i)] {
            acc.add(*j);
        }
        acc.value()
    }

    /// `K(t, s) = G(t, t) - G(t, s)`.
    pub fn to_kernel(&self) -> KernelSpec {
        let rows = (0..self.grid.len())
            .map(|i| {
                let at_t = self.cumulative(i, i);
                (0..i).map(|k| at_t - self.cumulative(i, k)).collect()
            })
            .collect();
        KernelSpec { grid: self.grid, rows }
    }
}

fn check_grid(k: &KernelSpec, w: &PathOnGrid) -> Result<()> {
    if k.grid != *w.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `h(t, w) = sum_{s_k < t} K(t, s_k) (w_{k+1} - w_k)`.
pub fn eval_h(k: &KernelSpec, w: &PathOnGrid, t: f64) -> Result<f64> {
    check_grid(k, w)?;
    let i = k.index(t)?;
    let v = w.values();
    let mut acc = CompensatedSum::default();
    for (j, kj) in k.rows[i].iter().enumerate() {
        acc.add(kj * (v[j + 1] - v[j]));
    }
    Ok(acc.value())
}

/// `h(t, w) = sum_{k <= i} w_{s_k} G(t, {s_k})`.
pub fn eval_h_dual(g: &RieszMeasure, w: &PathOnGrid, t: f64) -> Result<f64> {
    if g.grid != *w.grid() {
        return Err(Error::GridMismatch);
    }
    let i = g.grid.index_of(t)?;
    let mut acc = CompensatedSum::default();
    for (wk, dg) in w.values().iter().zip(&g.jumps[i]) {
        acc.add(wk * dg);
    }
    Ok(acc.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub t: f64,
    /// `exp(log_value)`; may be infinite when `log_value` exceeds the f64 range.
    pub value: f64,
    pub log_value: f64,
}

pub fn eval_f(k: &KernelSpec, x: &SemimartingalePath, t: f64) -> Result<FunctionalValue> {
    let log_value = eval_h(k, &x.compensated(), t)?;
    Ok(FunctionalValue {
        t,
        value: log_value.exp(),
        log_value,
    })
}

/// `|ln F(t,X) + ln F(t,Y) - ln F(t, X + Y + <X,Y>)|`.
pub fn check_fex2(k: &KernelSpec, x: &SemimartingalePath, y: &SemimartingalePath, t: f64) -> Result<f64> {
    let z = x.yor_sum(y)?;
    let a = eval_f(k, x, t)?.log_value;
    let b = eval_f(k, y, t)?.log_value;
    let c = eval_f(k, &z, t)?.log_value;
    Ok((a + b - c).abs())
}

/// `|h(t, w + w') - h(t, w) - h(t, w')|`.
pub fn additivity_check(k: &KernelSpec, w: &PathOnGrid, w2: &PathOnGrid, t: f64) -> Result<f64> {
    let sum = w.add(w2)?;
    Ok((eval_h(k, &sum, t)? - eval_h(k, w, t)? - eval_h(k, w2, t)?).abs())
}

/// Max over adjacent grid times of `|h(t_{k+1}, w) - h(t_k, w)|`.
pub fn continuity_modulus(k: &KernelSpec, w: &PathOnGrid) -> Result<f64> {
    check_grid(k, w)?;
    let hs = (0..k.grid.len())
        .map(|i| eval_h(k, w, k.grid.time(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(hs.windows(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max))
}

pub const KOLMOGOROV_EXPONENT: f64 = 2.0;
pub const KOLMOGOROV_SLACK: f64 = 0.1;
pub const MIN_KOLMOGOROV_PAIRS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KolmogorovReport {
    pub base: f64,
    pub separations: Vec<f64>,
    /// `int_0^T |K(t,s) - K(t',s)|^2 ds` per separation.
    pub integrals: Vec<f64>,
    /// Least-squares slope of log integral against log separation;
    /// `+inf` when every integral vanishes.
    pub alpha: f64,
    pub vacuous: bool,
    pub satisfied: bool,
}

/// Separations `T 2^{-j}`, `j = 3..=10`.
pub fn dyadic_separations(horizon: f64) -> Vec<f64> {
    (3..=10).map(|j| horizon * 2f64.powi(-j)).collect()
}

pub fn kolmogorov_modulus(k: &KernelSpec, base: f64, separations: &[f64]) -> Result<KolmogorovReport> {
    if separations.len() < MIN_KOLMOGOROV_PAIRS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_KOLMOGOROV_PAIRS} separations, got {}",
            separations.len()
        )));
    }
    let i = k.index(base)?;
    let step = k.grid.step();
    let integrals = separations
        .iter()
        .map(|&d| {
            let j = k.index(base + d)?;
            let width = i.max(j);
            Ok((0..width).map(|s| (k.value(i, s) - k.value(j, s)).powi(2)).sum::<f64>() * step)
        })
        .collect::<Result<Vec<f64>>>()?;
    let points: Vec<(f64, f64)> = separations
        .iter()
        .zip(&integrals)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&d, &v)| (d.ln(), v.ln()))
        .collect();
    let vacuous = points.is_empty();
    let alpha = if vacuous {
        f64::INFINITY
    } else if points.len() < 2 {
        f64::NAN
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        fit_line(&xs, &ys).slope
    };
    Ok(KolmogorovReport {
        base,
        separations: separations.to_vec(),
        integrals,
        alpha,
        vacuous,
        satisfied: alpha >= KOLMOGOROV_EXPONENT - KOLMOGOROV_SLACK,
    })
}

pub const DIVERGENCE_RATIO: f64 = 1.3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoughKernelReport {
    /// Max over grid times of the product-rule residual for `v(t) 1_{s<t}`.
    pub fex2_residual: f64,
    pub levels: Vec<u32>,
    /// Total variation of `v` on `2^level` uniform cells.
    pub variations: Vec<f64>,
    pub variation_ratios: Vec<f64>,
    pub variation_divergent: bool,
    /// Realized quadratic variation of `v(t)(W_t - t/2)` at `T` per level.
    pub quadratic_variations: Vec<f64>,
    /// `(max - min) / mean` of the realized quadratic variations.
    pub qv_spread: f64,
    pub verdict: String,
}

pub const ROUGH_VERDICT: &str = "semimartingale property: not supported (heuristic)";
pub const SMOOTH_VERDICT: &str = "finite variation (heuristic)";

/// `w` must live on a grid with `2^max(levels)` steps.
pub fn rough_scalar_kernel_demo(
    v: impl Fn(f64) -> f64,
    w: &std::sync::Arc<PathOnGrid>,
    levels: &[u32],
) -> Result<RoughKernelReport> {
    let grid = *w.grid();
    let finest = *levels
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("no refinement levels".into()))?;
    if grid.n_steps() != 1usize << finest {
        return Err(Error::InvalidArgument(format!(
            "driving path has {} steps, expected 2^{finest}",
            grid.n_steps()
        )));
    }
    let horizon = grid.horizon();
    let vs: Vec<f64> = grid.times().into_iter().map(&v).collect();
    let kernel = KernelSpec::from_fn(grid, |t, s| if s < t { vs[grid.index_of(t).unwrap_or(0)] } else { 0.0 })?;

    let x = SemimartingalePath::brownian(std::sync::Arc::clone(w));
    let n = grid.n_steps();
    let h: Vec<f64> = (0..n).map(|k| 0.5 + (std::f64::consts::TAU * grid.time(k)).sin()).collect();
    let b: Vec<f64> = (0..n).map(|k| 0.2 - grid.time(k)).collect();
    let y = SemimartingalePath::new(h, b, std::sync::Arc::clone(w))?;
    let mut fex2_residual = 0.0_f64;
    for i in 0..grid.len() {
        fex2_residual = fex2_residual.max(check_fex2(&kernel, &x, &y, grid.time(i))?);
    }

    let mut variations = Vec::with_capacity(levels.len());
    let mut quadratic_variations = Vec::with_capacity(levels.len());
    for &level in levels {
        let cells = 1usize << level;
        let dt = horizon / cells as f64;
        let tv: f64 = (0..cells).map(|k| (v((k + 1) as f64 * dt) - v(k as f64 * dt)).abs()).sum();
        variations.push(tv);
        let coarse = w.subsample(1usize << (finest - level))?;
        let z: Vec<f64> = coarse
            .grid()
            .times()
            .into_iter()
            .zip(coarse.values())
            .map(|(t, wt)| v(t) * (wt - t / 2.0))
            .collect();
        quadratic_variations.push(z.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum());
    }
    let variation_ratios: Vec<f64> = variations.windows(2).map(|p| p[1] / p[0]).collect();
    let variation_divergent = !variation_ratios.is_empty() && variation_ratios.iter().all(|&r| r >= DIVERGENCE_RATIO);
    let mean_qv = quadratic_variations.iter().sum::<f64>() / quadratic_variations.len() as f64;
    let (lo, hi) = quadratic_variations
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &q| (lo.min(q), hi.max(q)));
    Ok(RoughKernelReport {
        fex2_residual,
        levels: levels.to_vec(),
        variations,
        variation_ratios,
        variation_divergent,
        quadratic_variations,
        qv_spread: (hi - lo) / mean_qv,
        verdict: if variation_divergent { ROUGH_VERDICT } else { SMOOTH_VERDICT }.to_string(),
    })
}
