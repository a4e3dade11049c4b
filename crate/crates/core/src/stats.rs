//! Order-fixed reductions and small-sample statistics.
//!
//! Monte-Carlo samples are always collected into index-ordered vectors
//! before they are reduced here, so every statistic is independent of the
//! number of worker threads that produced the samples.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    sum(xs.iter().map(|x| (x - m) * (x - m))) / (n - 1) as f64
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mx = mean(xs);
    let my = mean(ys);
    sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my))) / (n - 1) as f64
}

/// Pearson correlation; `None` when either sample is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let vx = variance(xs);
    let vy = variance(ys);
    if vx <= 0.0 || vy <= 0.0 {
        return None;
    }
    Some(covariance(xs, ys) / (vx * vy).sqrt())
}

/// Standardized third and fourth moments (population form).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shape {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Returns `None` for a degenerate (constant) sample.
pub fn shape(xs: &[f64]) -> Option<Shape> {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = sum(xs.iter().map(|x| (x - m).powi(2))) / n;
    if !(m2 > 0.0) {
        return None;
    }
    let m3 = sum(xs.iter().map(|x| (x - m).powi(3))) / n;
    let m4 = sum(xs.iter().map(|x| (x - m).powi(4))) / n;
    Some(Shape {
        mean: m,
        variance: m2,
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

/// `ln(mean(exp(xs)))` without overflow.
pub fn log_mean_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let s = sum(xs.iter().map(|x| (x - max).exp()));
    max + (s / xs.len() as f64).ln()
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals.
    pub slope_stderr: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "line fit needs two points");
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    let sxx = sum(xs.iter().map(|x| (x - mx).powi(2)));
    let sxy = sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let syy = sum(ys.iter().map(|y| (y - my).powi(2)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = sum(xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2)));
    let slope_stderr = if xs.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LineFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    }
}

/// Two-sided standard normal critical value for level `alpha`.
pub fn normal_critical(alpha: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("unit normal")
        .inverse_cdf(1.0 - alpha / 2.0)
}

/// Two-sided tail probability of a standard normal at `z` sigmas.
pub fn normal_two_sided_tail(z: f64) -> f64 {
    2.0 * (1.0 - Normal::new(0.0, 1.0).expect("unit normal").cdf(z.abs()))
}

/// Two-sided Student-t critical value.
pub fn student_critical(alpha: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(xs), 2.0);
    }

    #[test]
    fn line_fit_exact() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = fit_line(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert!(fit.slope_stderr < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shape_of_symmetric_sample() {
        let s = shape(&[-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert_eq!(s.skewness, 0.0);
        assert!((s.excess_kurtosis + 2.0).abs() < 1e-14);
        assert!(shape(&[3.0, 3.0]).is_none());
    }

    #[test]
    fn critical_values() {
        assert!((normal_critical(0.05) - 1.959964).abs() < 1e-5);
        assert!((normal_two_sided_tail(4.0) - 6.334e-5).abs() < 1e-7);
        assert!(student_critical(0.05, 6.0) > 2.44);
    }

    #[test]
    fn log_mean_exp_large_values() {
        let v = log_mean_exp(&[1000.0, 1000.0]);
        assert!((v - 1000.0).abs() < 1e-12);
    }
}
