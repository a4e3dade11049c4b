//! Residual checks for the functional equation
//! `f(<X>_t, X_t) f(<Y>_t, Y_t) = f(<X+Y>_t, X_t + Y_t + <X,Y>_t)`
//! and the equations it reduces to on smaller domains.
//!
//! All residuals are `|lhs - rhs| / (1 + |rhs|)`.

use serde::{Deserialize, Serialize};

use super::{CandidateSurface, GaussianDensity};
use crate::error::{Error, Result};
use crate::path::{PathOnGrid, SemimartingalePath, TimeGrid};

/// Violation threshold used by [`grid_ae_check`].
pub const AE_THRESHOLD: f64 = 1e-8;

pub fn relative_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + rhs.abs())
}

fn positive(f: &dyn CandidateSurface, u: f64, v: f64) -> Result<f64> {
    let value = f.eval(u, v);
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonPositive {
            label: f.label(),
            u,
            v,
            value,
        })
    }
}

/// Per-time residual of the equation for the pair `(X, Y)`.
pub fn check_lob(
    f: &dyn CandidateSurface,
    x: &SemimartingalePath,
    y: &SemimartingalePath,
) -> Result<Vec<f64>> {
    let z = x.yor_sum(y)?;
    (0..x.grid().len())
        .map(|k| {
            let lhs = positive(f, x.sq_char()[k], x.values()[k])?
                * positive(f, y.sq_char()[k], y.values()[k])?;
            let rhs = positive(f, z.sq_char()[k], z.values()[k])?;
            Ok(relative_residual(lhs, rhs))
        })
        .collect()
}

/// Indicator of the cells `[u_k, u_{k+1})` with `s <= u_k < t`. For
/// `s == t` the single cell starting at `s` is used.
pub fn indicator_integrand(s: f64, t: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    if s > t {
        return Err(Error::InvalidInterval { s, t });
    }
    let i = grid.index_of(s)?;
    let j = grid.index_of(t)?;
    let (lo, hi) = if i == j {
        let lo = i.min(grid.n_steps() - 1);
        (lo, lo + 1)
    } else {
        (i, j)
    };
    Ok((0..grid.n_steps())
        .map(|k| if (lo..hi).contains(&k) { 1.0 } else { 0.0 })
        .collect())
}

/// Residual of `f(s, W_s) f(t - s, W_t - W_s) = f(t, W_t)`.
pub fn check_increment_eq(
    f: &dyn CandidateSurface,
    s: f64,
    t: f64,
    w: &PathOnGrid,
) -> Result<f64> {
    if s > t {
        return Err(Error::InvalidInterval { s, t });
    }
    let grid = w.grid();
    let (i, j) = (grid.index_of(s)?, grid.index_of(t)?);
    let (s, t) = (grid.time(i), grid.time(j));
    let (ws, wt) = (w.values()[i], w.values()[j]);
    let lhs = positive(f, s, ws)? * positive(f, t - s, wt - ws)?;
    let rhs = positive(f, t, wt)?;
    Ok(relative_residual(lhs, rhs))
}

/// A point `(s, t, x, y)` of the two-variable Cauchy equation
/// `f(s, x) f(t - s, y) = f(t, x + y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub s: f64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport {
    pub residuals: Vec<f64>,
    /// Index of the largest residual.
    pub worst: Option<usize>,
}

impl CauchyReport {
    pub fn max_residual(&self) -> f64 {
        self.worst.map_or(0.0, |i| self.residuals[i])
    }
}

pub fn check_cauchy2d(f: &dyn CandidateSurface, triples: &[Triple]) -> Result<CauchyReport> {
    let residuals = triples
        .iter()
        .map(|&Triple { s, t, x, y }| {
            if !(s > 0.0 && t > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "Cauchy triple needs s, t > 0, got s = {s}, t = {t}"
                )));
            }
            if s > t {
                return Err(Error::InvalidInterval { s, t });
            }
            let lhs = positive(f, s, x)? * positive(f, t - s, y)?;
            let rhs = positive(f, t, x + y)?;
            Ok(relative_residual(lhs, rhs))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = residuals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    Ok(CauchyReport { residuals, worst })
}

/// Per-time residual of `f(t, W_t)^2 = f(4t, 2 W_t + t)`.
pub fn check_single_bm(f: &dyn CandidateSurface, w: &PathOnGrid) -> Result<Vec<f64>> {
    w.grid()
        .times()
        .into_iter()
        .zip(w.values())
        .map(|(t, &wt)| {
            let a = positive(f, t, wt)?;
            let rhs = positive(f, 4.0 * t, 2.0 * wt + t)?;
            Ok(relative_residual(a * a, rhs))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AeReport {
    /// Gaussian-weighted fraction of cells whose residual exceeds
    /// [`AE_THRESHOLD`].
    pub fraction: f64,
    /// Gaussian mass captured by the truncated lattice.
    pub captured_mass: f64,
}

/// Weighted violation fraction of the Cauchy equation at fixed `(s, t)`
/// over `(x, y) in [-5 sqrt(t), 5 sqrt(t)]^2`, with weight
/// `rho(s, x) rho(t - s, y)`, the joint law of `(W_s, W_t - W_s)`.
pub fn grid_ae_check(
    f: &dyn CandidateSurface,
    s: f64,
    t: f64,
    n_cells: usize,
) -> Result<AeReport> {
    if !(s > 0.0 && s < t) {
        return Err(Error::InvalidArgument(format!(
            "a.e. check needs 0 < s < t, got s = {s}, t = {t}"
        )));
    }
    if n_cells == 0 {
        return Err(Error::InvalidArgument("n_cells must be positive".into()));
    }
    let rho = GaussianDensity;
    let half = 5.0 * t.sqrt();
    let width = 2.0 * half / n_cells as f64;
    let centre = |i: usize| -half + (i as f64 + 0.5) * width;
    let mut total = crate::stats::CompensatedSum::default();
    let mut bad = crate::stats::CompensatedSum::default();
    for i in 0..n_cells {
        let x = centre(i);
        let wx = rho.eval(s, x);
        let fx = positive(f, s, x)?;
        for j in 0..n_cells {
            let y = centre(j);
            let weight = wx * rho.eval(t - s, y) * width * width;
            total.add(weight);
            let lhs = fx * positive(f, t - s, y)?;
            let rhs = positive(f, t, x + y)?;
            if relative_residual(lhs, rhs) > AE_THRESHOLD {
                bad.add(weight);
            }
        }
    }
    Ok(AeReport {
        fraction: bad.value() / total.value(),
        captured_mass: total.value(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::path::{build_semimartingale, make_grid, sample_brownian};
    use crate::rng::Seed;
    use crate::surface::{
        AffineExponentSurface, CanonicalSurface, CounterexampleSurface, FnSurface, Smoothness,
    };

    fn driver(n: usize, index: u64) -> Arc<PathOnGrid> {
        Arc::new(sample_brownian(&make_grid(1.0, n).unwrap(), Seed::new(17, index)))
    }

    fn max(xs: &[f64]) -> f64 {
        xs.iter().copied().fold(0.0, f64::max)
    }

    #[test]
    fn lob_canonical_and_identity() {
        let w = driver(32, 0);
        let h: Vec<f64> = (0..32).map(|k| ((k as f64) * 0.37).sin() * 2.0).collect();
        let b: Vec<f64> = (0..32).map(|k| ((k as f64) * 0.11).cos()).collect();
        let x = build_semimartingale(&h, &b, &w).unwrap();
        let y = SemimartingalePath::brownian(Arc::clone(&w)).scaled(-0.7);
        for c in [-2.0, -1.0, 0.5, 1.0, 2.0] {
            assert!(max(&check_lob(&CanonicalSurface::new(c), &x, &y).unwrap()) <= 1e-12);
        }
        assert!(check_lob(&CanonicalSurface::new(0.0), &x, &y)
            .unwrap()
            .iter()
            .all(|&r| r == 0.0));
    }

    #[test]
    fn lob_counterexample_violated() {
        let grid = make_grid(1.0, 16).unwrap();
        let hx = indicator_integrand(0.0, 0.5, &grid).unwrap();
        let hy = indicator_integrand(0.5, 1.0, &grid).unwrap();
        let zero = vec![0.0; 16];
        let worst = (0..10)
            .map(|i| {
                let w = driver(16, i);
                let x = build_semimartingale(&hx, &zero, &w).unwrap();
                let y = build_semimartingale(&hy, &zero, &w).unwrap();
                max(&check_lob(&CounterexampleSurface, &x, &y).unwrap())
            })
            .fold(0.0, f64::max);
        assert!(worst > 0.1, "worst = {worst}");
    }

    #[test]
    fn lob_rejects_non_positive_surface() {
        let w = driver(4, 1);
        let x = SemimartingalePath::brownian(Arc::clone(&w));
        let f = FnSurface::new("neg", Smoothness::Continuous, |_, v| v);
        assert!(matches!(check_lob(&f, &x, &x), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn indicator_examples() {
        let g = make_grid(1.0, 4).unwrap();
        assert_eq!(indicator_integrand(0.0, 1.0, &g).unwrap(), vec![1.0; 4]);
        assert_eq!(indicator_integrand(0.25, 0.75, &g).unwrap(), vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(indicator_integrand(0.5, 0.5, &g).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(indicator_integrand(1.0, 1.0, &g).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!(indicator_integrand(0.3, 0.75, &g).is_err());
        assert!(indicator_integrand(0.75, 0.25, &g).is_err());
    }

    #[test]
    fn increment_equation() {
        let w = driver(16, 2);
        let grid = *w.grid();
        for c in [-2.0, 0.5, 1.0] {
            let f = CanonicalSurface::new(c);
            for i in 0..=16 {
                for j in i..=16 {
                    let r = check_increment_eq(&f, grid.time(i), grid.time(j), &w).unwrap();
                    assert!(r <= 1e-12);
                }
            }
        }
        // f(0,0) = 2 breaks the equation at s = t
        let f = FnSurface::new("2exp", Smoothness::Analytic, |u, v| 2.0 * (v - u / 2.0).exp());
        let r = check_increment_eq(&f, 0.5, 0.5, &w).unwrap();
        let ws = w.value_at(0.5).unwrap();
        let fs = f.eval(0.5, ws);
        let expected = (2.0 * fs - fs).abs() / (1.0 + fs);
        assert!((r - expected).abs() < 1e-14);
        assert!(r > 0.0);
        // s = 0 also forces f(0,0) = 1
        assert!(check_increment_eq(&f, 0.0, 0.5, &w).unwrap() > 0.0);
        assert!(check_increment_eq(&CanonicalSurface::new(1.0), 0.0, 0.5, &w).unwrap() <= 1e-15);
    }

    #[test]
    fn cauchy_counterexample_triple() {
        let triple = Triple { s: 1.0, t: 2.0, x: 1.0, y: 0.0 };
        let report = check_cauchy2d(&CounterexampleSurface, &[triple]).unwrap();
        // lhs = e * e, rhs = 1
        let e2 = std::f64::consts::E.powi(2);
        assert!((report.residuals[0] - (e2 - 1.0) / 2.0).abs() < 1e-14);
        assert!(report.max_residual() >= 1.0);
        assert_eq!(report.worst, Some(0));
    }

    #[test]
    fn cauchy_accepts_general_exponential_solution() {
        let triples: Vec<Triple> = (1..20)
            .map(|i| {
                let i = i as f64;
                Triple { s: 0.1 * i, t: 0.15 * i, x: (i * 0.7).sin(), y: (i * 1.3).cos() }
            })
            .collect();
        let f = AffineExponentSurface { c: 0.0, b: 1.0 };
        assert!(check_cauchy2d(&f, &triples).unwrap().max_residual() <= 1e-12);
        let f = AffineExponentSurface { c: -1.5, b: 0.4 };
        assert!(check_cauchy2d(&f, &triples).unwrap().max_residual() <= 1e-12);
        assert!(check_cauchy2d(&f, &[Triple { s: 0.0, t: 1.0, x: 0.0, y: 0.0 }]).is_err());
        assert!(check_cauchy2d(&f, &[Triple { s: 2.0, t: 1.0, x: 0.0, y: 0.0 }]).is_err());
    }

    #[test]
    fn single_bm_equation() {
        for i in 0..5 {
            let w = driver(64, 10 + i);
            assert!(max(&check_single_bm(&CounterexampleSurface, &w).unwrap()) <= 1e-12);
            assert!(max(&check_single_bm(&CanonicalSurface::new(1.5), &w).unwrap()) <= 1e-12);
            // b != -c/2: exponents differ by (c/2 + b) * 2t ... nonzero for t > 0
            let f = AffineExponentSurface { c: 1.0, b: 0.5 };
            assert!(max(&check_single_bm(&f, &w).unwrap()) > 0.1);
        }
    }

    #[test]
    fn ae_fraction() {
        assert_eq!(grid_ae_check(&CanonicalSurface::new(1.0), 1.0, 2.0, 60).unwrap().fraction, 0.0);
        let r = grid_ae_check(&CounterexampleSurface, 1.0, 2.0, 200).unwrap();
        assert!(r.fraction > 0.5, "fraction = {}", r.fraction);
        assert!(r.captured_mass > 0.999);
        assert!(grid_ae_check(&CounterexampleSurface, 2.0, 2.0, 10).is_err());
    }

    #[test]
    fn ae_fraction_of_thin_perturbation_is_small() {
        // canonical except on the line u = 2 with v in [0.3, 0.3 + width)
        let (s, t, n) = (1.0_f64, 2.0_f64, 200usize);
        let width = 10.0 * t.sqrt() / n as f64;
        let f = FnSurface::new("perturbed", Smoothness::Measurable, move |u, v| {
            let base = (v - u / 2.0).exp();
            if u == 2.0 && (0.3..0.3 + width).contains(&v) {
                1.5 * base
            } else {
                base
            }
        });
        let r = grid_ae_check(&f, s, t, n).unwrap();
        // bounded by the Gaussian mass of a band of width ~ one cell
        let bound = 1.5 * GaussianDensity.eval(t, 0.0) * width;
        assert!(r.fraction > 0.0 && r.fraction <= bound, "{} vs {bound}", r.fraction);
    }
}
