//! Monte-Carlo tests of the martingale structure of `f(t, W_t)`.
//!
//! For a positive solution `f`, `g(t) = E f(t, W_t)` is exponential,
//! `f(t, W_t) e^{-lambda_1 t}`, `f^2(t, W_t) e^{-lambda_2 t}` and
//! `f(4t, 2 W_t + t) e^{-lambda_2 t}` are martingales, and
//! `lambda_1 <= lambda_2 / 2`. This module estimates the exponents,
//! tests the martingale property against a fixed family of test
//! functions, and checks the log-normality that makes every moment finite.
//!
//! Samples are produced in parallel but always collected in path order
//! and reduced sequentially, so results do not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{make_grid, sample_brownian, TimeGrid};
use crate::rng::{fill_standard_normal, Seed};
use crate::stats::{self, fit_line, log_mean_exp, normal_critical, normal_two_sided_tail};
use crate::surface::CandidateSurface;

/// Number of grid times used by the exponent regression.
pub const REGRESSION_TIMES: usize = 8;
/// Family-level significance of the martingale tests: two-sided 4 sigma.
pub const FAMILY_SIGMAS: f64 = 4.0;
/// Largest admitted variance of `ln f^2(T, W_T)` before the horizon is
/// halved.
pub const MAX_LOG_VARIANCE: f64 = 6.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimates {
    pub lambda1: f64,
    pub lambda2: f64,
    /// 95% half-widths.
    pub half_width1: f64,
    pub half_width2: f64,
    pub r_squared1: f64,
    pub r_squared2: f64,
    pub times: Vec<f64>,
    pub log_mean_f: Vec<f64>,
    pub log_mean_f2: Vec<f64>,
}

impl LambdaEstimates {
    /// Writes `t, E f, E f^2` rows.
    pub fn write_curve_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "t,mean_f,mean_f2")?;
        for ((t, a), b) in self.times.iter().zip(&self.log_mean_f).zip(&self.log_mean_f2) {
            writeln!(out, "{t},{},{}", a.exp(), b.exp())?;
        }
        Ok(())
    }
}

fn ln_f_checked(f: &dyn CandidateSurface, t: f64, x: f64, path: u64) -> Result<f64> {
    let l = f.ln_eval(t, x);
    if l.is_finite() {
        Ok(l)
    } else {
        Err(Error::NonFinite { t, path })
    }
}

fn regression_indices(grid: &TimeGrid) -> Result<Vec<usize>> {
    let n = grid.n_steps();
    if n % REGRESSION_TIMES != 0 {
        return Err(Error::InvalidArgument(format!(
            "grid with {n} steps cannot host {REGRESSION_TIMES} regression times"
        )));
    }
    Ok((1..=REGRESSION_TIMES).map(|k| k * n / REGRESSION_TIMES).collect())
}

/// Slope of `log mean exp(samples[., k])` against `times`, with a
/// delta-method variance from the sample covariance of the means (paths
/// are shared across times) plus the regression residual variance.
fn log_mean_slope(times: &[f64], samples: &[Vec<f64>]) -> (f64, f64, f64, Vec<f64>) {
    let m = times.len();
    let n = samples.len() as f64;
    let maxima: Vec<f64> = (0..m)
        .map(|k| samples.iter().map(|s| s[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let scaled: Vec<Vec<f64>> = (0..m)
        .map(|k| samples.iter().map(|s| (s[k] - maxima[k]).exp()).collect())
        .collect();
    let means: Vec<f64> = scaled.iter().map(|z| stats::mean(z)).collect();
    let log_means: Vec<f64> = (0..m).map(|k| maxima[k] + means[k].ln()).collect();

    let fit = fit_line(times, &log_means);
    let t_bar = stats::mean(times);
    let sxx = stats::sum(times.iter().map(|t| (t - t_bar).powi(2)));
    let weights: Vec<f64> = times.iter().map(|t| (t - t_bar) / sxx).collect();
    let mut var = stats::CompensatedSum::default();
    for k in 0..m {
        for l in 0..m {
            let cov = stats::covariance(&scaled[k], &scaled[l]) / n;
            var.add(weights[k] * weights[l] * cov / (means[k] * means[l]));
        }
    }
    let variance = var.value().max(0.0) + fit.slope_stderr.powi(2);
    let half_width = (normal_critical(0.05) * variance.sqrt()).max(f64::EPSILON);
    (fit.slope, half_width, fit.r_squared, log_means)
}

fn sample_paths<T: Send>(
    grid: &TimeGrid,
    n_paths: usize,
    seed: Seed,
    per_path: impl Fn(u64, &[f64]) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let w = sample_brownian(grid, seed.path(i));
            per_path(i, w.values())
        })
        .collect()
}

/// Fits `lambda_1` and `lambda_2` from `ln E f(t, W_t)` and
/// `ln E f^2(t, W_t)` at the eight times `k T / 8`.
pub fn estimate_lambda(
    f: &dyn CandidateSurface,
    grid: &TimeGrid,
    n_paths: usize,
    seed: Seed,
) -> Result<LambdaEstimates> {
    if n_paths < 1000 {
        return Err(Error::InvalidArgument(format!(
            "lambda estimation needs at least 1000 paths, got {n_paths}"
        )));
    }
    let idx = regression_indices(grid)?;
    let times: Vec<f64> = idx.iter().map(|&k| grid.time(k)).collect();
    let samples = sample_paths(grid, n_paths, seed, |path, w| {
        idx.iter()
            .zip(&times)
            .map(|(&k, &t)| ln_f_checked(f, t, w[k], path))
            .collect::<Result<Vec<f64>>>()
    })?;
    let squared: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.iter().map(|l| 2.0 * l).collect())
        .collect();
    let (lambda1, half_width1, r_squared1, log_mean_f) = log_mean_slope(&times, &samples);
    let (lambda2, half_width2, r_squared2, log_mean_f2) = log_mean_slope(&times, &squared);
    Ok(LambdaEstimates {
        lambda1,
        lambda2,
        half_width1,
        half_width2,
        r_squared1,
        r_squared2,
        times,
        log_mean_f,
        log_mean_f2,
    })
}

/// Largest `T / 2^j <= horizon` at which the sample variance of
/// `ln f^2(T, W_T)` is at most [`MAX_LOG_VARIANCE`]. Keeps second
/// moments of log-normal surfaces estimable with a fixed path budget.
pub fn heavy_tail_horizon(
    f: &dyn CandidateSurface,
    horizon: f64,
    n_paths: usize,
    seed: Seed,
) -> Result<f64> {
    let mut z = vec![0.0; n_paths];
    fill_standard_normal(seed, &mut z);
    let mut t = horizon;
    for _ in 0..10 {
        let logs = z
            .iter()
            .enumerate()
            .map(|(i, zi)| ln_f_checked(f, t, t.sqrt() * zi, i as u64).map(|l| 2.0 * l))
            .collect::<Result<Vec<f64>>>()?;
        if stats::variance(&logs) <= MAX_LOG_VARIANCE {
            return Ok(t);
        }
        t /= 2.0;
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    One,
    Sign,
    Identity,
    Square,
    Cos,
}

impl TestFunction {
    pub const ALL: [TestFunction; 5] = [
        TestFunction::One,
        TestFunction::Sign,
        TestFunction::Identity,
        TestFunction::Square,
        TestFunction::Cos,
    ];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Self::Identity => x,
            Self::Square => x * x,
            Self::Cos => x.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleStat {
    pub psi: TestFunction,
    pub s: f64,
    pub t: f64,
    /// Sample mean of `(M_t - M_s) psi(W_s)`.
    pub estimate: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleTestReport {
    pub process: String,
    pub stats: Vec<MartingaleStat>,
    /// Bonferroni-corrected critical value.
    pub z_crit: f64,
    pub pass: bool,
}

impl MartingaleTestReport {
    pub fn max_abs_z(&self) -> f64 {
        self.stats.iter().map(|s| s.z.abs()).fold(0.0, f64::max)
    }
}

/// Critical |z| for `m` simultaneous two-sided tests at family level
/// [`FAMILY_SIGMAS`].
pub fn bonferroni_critical(m: usize) -> f64 {
    normal_critical(normal_two_sided_tail(FAMILY_SIGMAS) / m as f64)
}

/// The two `(s, t)` pairs `(T/4, T/2)` and `(T/2, T)` of the design.
fn design_pairs(grid: &TimeGrid) -> Result<[(usize, usize); 2]> {
    let n = grid.n_steps();
    if n % 4 != 0 {
        return Err(Error::InvalidArgument(format!(
            "grid with {n} steps cannot host the (T/4, T/2), (T/2, T) design"
        )));
    }
    Ok([(n / 4, n / 2), (n / 2, n)])
}

fn run_martingale_test(
    process: String,
    grid: &TimeGrid,
    n_paths: usize,
    seed: Seed,
    log_m: impl Fn(f64, f64) -> f64 + Sync,
) -> Result<MartingaleTestReport> {
    let pairs = design_pairs(grid)?;
    let n_psi = TestFunction::ALL.len();
    // per path: for each pair, M_t - M_s followed by the psi(W_s) values
    let rows = sample_paths(grid, n_paths, seed, |path, w| {
        let mut row = Vec::with_capacity(pairs.len() * n_psi);
        for &(i, j) in &pairs {
            let (s, t) = (grid.time(i), grid.time(j));
            let ms = log_m(s, w[i]).exp();
            let mt = log_m(t, w[j]).exp();
            if !ms.is_finite() {
                return Err(Error::NonFinite { t: s, path });
            }
            if !mt.is_finite() {
                return Err(Error::NonFinite { t, path });
            }
            let d = mt - ms;
            row.extend(TestFunction::ALL.iter().map(|psi| d * psi.eval(w[i])));
        }
        Ok(row)
    })?;
    let sqrt_n = (n_paths as f64).sqrt();
    let mut out = Vec::with_capacity(pairs.len() * n_psi);
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for (q, &psi) in TestFunction::ALL.iter().enumerate() {
            let column: Vec<f64> = rows.iter().map(|r| r[p * n_psi + q]).collect();
            let estimate = stats::mean(&column);
            let stderr = stats::variance(&column).sqrt() / sqrt_n;
            let z = if estimate == 0.0 {
                0.0
            } else {
                estimate / stderr
            };
            out.push(MartingaleStat {
                psi,
                s: grid.time(i),
                t: grid.time(j),
                estimate,
                stderr,
                z,
            });
        }
    }
    let z_crit = bonferroni_critical(out.len());
    let pass = out.iter().all(|s| s.z.abs() <= z_crit);
    Ok(MartingaleTestReport {
        process,
        stats: out,
        z_crit,
        pass,
    })
}

/// Tests that `f^power(t, W_t) e^{-lambda t}` is a martingale.
pub fn martingale_test(
    f: &dyn CandidateSurface,
    lambda: f64,
    power: u32,
    grid: &TimeGrid,
    n_paths: usize,
    seed: Seed,
) -> Result<MartingaleTestReport> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite, got {lambda}")));
    }
    if !(1..=2).contains(&power) {
        return Err(Error::InvalidArgument(format!("power must be 1 or 2, got {power}")));
    }
    let p = power as f64;
    run_martingale_test(
        format!("f^{power}(t,W_t) exp(-{lambda} t)"),
        grid,
        n_paths,
        seed,
        |t, w| p * f.ln_eval(t, w) - lambda * t,
    )
}

/// Tests that `f(4t, 2 W_t + t) e^{-lambda_2 t}` is a martingale.
pub fn check_form21_martingale(
    f: &dyn CandidateSurface,
    lambda2: f64,
    grid: &TimeGrid,
    n_paths: usize,
    seed: Seed,
) -> Result<MartingaleTestReport> {
    if !lambda2.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite, got {lambda2}")));
    }
    run_martingale_test(
        format!("f(4t,2W_t+t) exp(-{lambda2} t)"),
        grid,
        n_paths,
        seed,
        |t, w| f.ln_eval(4.0 * t, 2.0 * w + t) - lambda2 * t,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub pass: bool,
    /// `lambda_2 / 2 - lambda_1`.
    pub margin: f64,
    /// Combined half-width `hw_1 + hw_2 / 2` the margin may fall below 0 by.
    pub tolerance: f64,
}

/// `lambda_1 <= lambda_2 / 2` up to the combined confidence half-width.
pub fn holder_check(est: &LambdaEstimates) -> HolderCheck {
    let margin = 0.5 * est.lambda2 - est.lambda1;
    let tolerance = est.half_width1 + 0.5 * est.half_width2;
    HolderCheck {
        pass: margin >= -tolerance,
        margin,
        tolerance,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub t: f64,
    pub n_paths: usize,
    /// `ln f(t, W_t)` is constant.
    pub degenerate: bool,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub skewness_stderr: f64,
    pub kurtosis_stderr: f64,
    /// Correlation of `A = ln f(t/2, W_{t/2}) + ln f(t/2, W_t - W_{t/2})`
    /// and `B = ln f(t, 2 W_{t/2} - W_t)`; `None` when either is constant.
    pub correlation: Option<f64>,
    pub correlation_bound: f64,
    pub pass: bool,
}

/// Moment test of log-normality of `f(t, W_t)` and of independence of the
/// sum/difference pair that forces it.
pub fn bernstein_normality_test(
    f: &dyn CandidateSurface,
    t: f64,
    n_paths: usize,
    seed: Seed,
) -> Result<NormalityReport> {
    let grid = make_grid(t, 2)?;
    let half = grid.time(1);
    let rows = sample_paths(&grid, n_paths, seed, |path, w| {
        let (wh, wt) = (w[1], w[2]);
        let a = ln_f_checked(f, half, wh, path)? + ln_f_checked(f, half, wt - wh, path)?;
        let b = ln_f_checked(f, t, 2.0 * wh - wt, path)?;
        let l = ln_f_checked(f, t, wt, path)?;
        Ok([a, b, l])
    })?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let (a, b, l) = (col(0), col(1), col(2));
    let n = n_paths as f64;
    let skewness_stderr = (6.0 / n).sqrt();
    let kurtosis_stderr = (24.0 / n).sqrt();
    let correlation_bound = 4.0 / n.sqrt();
    let correlation = stats::correlation(&a, &b);
    let shape = stats::shape(&l);
    let (degenerate, skewness, excess_kurtosis) = match shape {
        Some(s) => (false, s.skewness, s.excess_kurtosis),
        None => (true, 0.0, 0.0),
    };
    let pass = degenerate
        || (skewness.abs() <= 4.0 * skewness_stderr
            && excess_kurtosis.abs() <= 4.0 * kurtosis_stderr
            && correlation.map_or(true, |c| c.abs() <= correlation_bound));
    Ok(NormalityReport {
        t,
        n_paths,
        degenerate,
        skewness,
        excess_kurtosis,
        skewness_stderr,
        kurtosis_stderr,
        correlation,
        correlation_bound,
        pass,
    })
}

/// Powers checked for integrability of `f(t, W_t)`.
pub const MOMENT_POWERS: [f64; 5] = [-2.0, -1.0, 1.0, 2.0, 4.0];

/// `ln E f^p(t, W_t)` for each `p` in [`MOMENT_POWERS`]; finite values
/// are the machine-checkable part of integrability at every power.
pub fn log_moments(
    f: &dyn CandidateSurface,
    t: f64,
    n_paths: usize,
    seed: Seed,
) -> Result<Vec<(f64, f64)>> {
    let mut z = vec![0.0; n_paths];
    fill_standard_normal(seed, &mut z);
    let logs = z
        .iter()
        .enumerate()
        .map(|(i, zi)| ln_f_checked(f, t, t.sqrt() * zi, i as u64))
        .collect::<Result<Vec<f64>>>()?;
    Ok(MOMENT_POWERS
        .iter()
        .map(|&p| {
            let scaled: Vec<f64> = logs.iter().map(|l| p * l).collect();
            (p, log_mean_exp(&scaled))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{CanonicalSurface, CounterexampleSurface};

    fn grid() -> TimeGrid {
        make_grid(1.0, 16).unwrap()
    }

    #[test]
    fn lambda_for_constant_surface_is_zero() {
        let est = estimate_lambda(&CanonicalSurface::new(0.0), &grid(), 1000, Seed::new(1, 0)).unwrap();
        assert_eq!(est.lambda1, 0.0);
        assert_eq!(est.lambda2, 0.0);
        assert!(est.half_width1 > 0.0 && est.half_width2 > 0.0);
    }

    #[test]
    fn lambda_rejects_small_samples_and_bad_grids() {
        let f = CanonicalSurface::new(1.0);
        assert!(estimate_lambda(&f, &grid(), 10, Seed::new(1, 0)).is_err());
        assert!(estimate_lambda(&f, &make_grid(1.0, 12).unwrap(), 1000, Seed::new(1, 0)).is_err());
    }

    #[test]
    fn lambda_for_canonical_surfaces() {
        // E exp(a W_t) = exp(a^2 t / 2) gives lambda1 = (c^2 - c)/2, lambda2 = 2c^2 - c
        for c in [1.0, 2.0] {
            let f = CanonicalSurface::new(c);
            let g = make_grid(0.25, 16).unwrap();
            let est = estimate_lambda(&f, &g, 20_000, Seed::new(2, 0)).unwrap();
            let (l1, l2) = ((c * c - c) / 2.0, 2.0 * c * c - c);
            assert!((est.lambda1 - l1).abs() <= 2.0 * est.half_width1, "{est:?}");
            assert!((est.lambda2 - l2).abs() <= 2.0 * est.half_width2, "{est:?}");
        }
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let f = crate::surface::FnSurface::new("blowup", crate::surface::Smoothness::Continuous, |u, _| {
            if u > 0.5 { f64::INFINITY } else { 1.0 }
        });
        let err = estimate_lambda(&f, &grid(), 1000, Seed::new(1, 0)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { path: 0, .. }), "{err}");
    }

    #[test]
    fn constant_surface_statistics_are_exactly_zero() {
        let r = martingale_test(&CanonicalSurface::new(0.0), 0.0, 1, &grid(), 500, Seed::new(3, 0)).unwrap();
        assert!(r.pass);
        assert!(r.stats.iter().all(|s| s.estimate == 0.0 && s.z == 0.0));
        assert_eq!(r.stats.len(), 10);
        let r = check_form21_martingale(&CanonicalSurface::new(0.0), 0.0, &grid(), 500, Seed::new(3, 0)).unwrap();
        assert!(r.stats.iter().all(|s| s.estimate == 0.0));
    }

    #[test]
    fn stochastic_exponential_is_a_martingale() {
        let f = CanonicalSurface::new(1.0);
        let r = martingale_test(&f, 0.0, 1, &grid(), 20_000, Seed::new(4, 0)).unwrap();
        assert!(r.pass, "max |z| = {}", r.max_abs_z());
        let r = martingale_test(&f, 0.5, 1, &grid(), 20_000, Seed::new(4, 0)).unwrap();
        assert!(!r.pass);
        let one = r.stats.iter().find(|s| s.psi == TestFunction::One && s.s == 0.5).unwrap();
        // E[M_1 - M_{1/2}] = e^{-1/2} - e^{-1/4}
        let expected = (-0.5f64).exp() - (-0.25f64).exp();
        assert!((one.estimate - expected).abs() < 5.0 * one.stderr);
    }

    #[test]
    fn martingale_test_argument_errors() {
        let f = CanonicalSurface::new(1.0);
        assert!(martingale_test(&f, f64::NAN, 1, &grid(), 10, Seed::new(0, 0)).is_err());
        assert!(martingale_test(&f, 0.0, 3, &grid(), 10, Seed::new(0, 0)).is_err());
        assert!(martingale_test(&f, 0.0, 1, &make_grid(1.0, 6).unwrap(), 10, Seed::new(0, 0)).is_err());
    }

    #[test]
    fn bonferroni_threshold_exceeds_family_level() {
        assert!((bonferroni_critical(1) - 4.0).abs() < 1e-6);
        let z = bonferroni_critical(10);
        assert!(z > 4.4 && z < 4.7, "{z}");
    }

    fn estimates(l1: f64, l2: f64) -> LambdaEstimates {
        LambdaEstimates {
            lambda1: l1,
            lambda2: l2,
            half_width1: 1e-3,
            half_width2: 1e-3,
            r_squared1: 1.0,
            r_squared2: 1.0,
            times: vec![],
            log_mean_f: vec![],
            log_mean_f2: vec![],
        }
    }

    #[test]
    fn holder_examples() {
        let h = holder_check(&estimates(0.0, 1.0));
        assert!(h.pass && (h.margin - 0.5).abs() < 1e-15);
        let h = holder_check(&estimates(1.0, 6.0));
        assert!(h.pass && (h.margin - 2.0).abs() < 1e-15);
        assert!(!holder_check(&estimates(1.0, 1.0)).pass);
    }

    #[test]
    fn normality_degenerate_branch() {
        let r = bernstein_normality_test(&CanonicalSurface::new(0.0), 1.0, 1000, Seed::new(5, 0)).unwrap();
        assert!(r.degenerate && r.pass);
        assert!(r.correlation.is_none());
    }

    #[test]
    fn normality_rejects_counterexample() {
        let r = bernstein_normality_test(&CounterexampleSurface, 1.0, 20_000, Seed::new(6, 0)).unwrap();
        // ln f = |(2W - 1)|^(1/3) is left-skewed (about -0.31) and
        // A, B are correlated (about 0.32)
        assert!(!r.pass);
        assert!(r.skewness.abs() > 4.0 * r.skewness_stderr);
        assert!(r.correlation.unwrap().abs() > r.correlation_bound);
    }

    #[test]
    fn normality_accepts_canonical() {
        let r = bernstein_normality_test(&CanonicalSurface::new(1.0), 1.0, 20_000, Seed::new(7, 0)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn heavy_tail_horizon_shrinks_for_steep_surfaces() {
        let seed = Seed::new(8, 0);
        assert_eq!(heavy_tail_horizon(&CanonicalSurface::new(1.0), 1.0, 20_000, seed).unwrap(), 1.0);
        assert_eq!(heavy_tail_horizon(&CanonicalSurface::new(2.0), 1.0, 20_000, seed).unwrap(), 0.25);
        assert_eq!(heavy_tail_horizon(&CounterexampleSurface, 1.0, 20_000, seed).unwrap(), 1.0);
    }

    #[test]
    fn moments_are_finite() {
        let m = log_moments(&CanonicalSurface::new(1.0), 1.0, 20_000, Seed::new(9, 0)).unwrap();
        assert_eq!(m.len(), 5);
        for (p, l) in m {
            // ln E exp(p (W - 1/2)) = (p^2 - p) / 2
            assert!(l.is_finite());
            assert!((l - (p * p - p) / 2.0).abs() < 0.5 + 0.1 * p * p, "p = {p}: {l}");
        }
    }
}
