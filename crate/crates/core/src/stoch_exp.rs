//! The stochastic exponential `E_t(X) = exp(X_t - <X>_t / 2)`.
//!
//! Identity checks use the closed form only; the Euler recursion for
//! `Z = 1 + int Z dX` is a separate numerical cross-check.

use crate::error::{Error, Result};
use crate::path::{SemimartingalePath, TimeGrid};

/// Above this log-magnitude residuals are compared in log space.
pub const LOG_SPACE_THRESHOLD: f64 = 30.0;

/// Strictly positive path with `Z_0 = 1`, stored as `ln Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialPath {
    grid: TimeGrid,
    log_values: Vec<f64>,
}

impl ExponentialPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.exp()).collect()
    }

    pub fn last(&self) -> f64 {
        self.log_values.last().copied().unwrap_or(0.0).exp()
    }
}

pub fn stoch_exp_closed(x: &SemimartingalePath) -> ExponentialPath {
    ExponentialPath {
        grid: *x.grid(),
        log_values: x.compensated().into_values(),
    }
}

/// Explicit Euler scheme `Z_{k+1} = Z_k (1 + dX_k)`.
pub fn stoch_exp_sde(x: &SemimartingalePath) -> Result<ExponentialPath> {
    let mut log_values = Vec::with_capacity(x.grid().len());
    let mut z = 1.0_f64;
    log_values.push(0.0);
    for (k, w) in x.values().windows(2).enumerate() {
        z *= 1.0 + (w[1] - w[0]);
        if !(z > 0.0) {
            return Err(Error::PositivityLost { index: k + 1 });
        }
        log_values.push(z.ln());
    }
    Ok(ExponentialPath {
        grid: *x.grid(),
        log_values,
    })
}

/// Discrepancy between two positive numbers given by their logarithms:
/// `|a - b| / (1 + |b|)` in linear space, or `|ln a - ln b|` once either
/// side exceeds `e^30`.
pub fn log_pair_residual(log_lhs: f64, log_rhs: f64) -> f64 {
    if log_lhs.max(log_rhs) > LOG_SPACE_THRESHOLD {
        return (log_lhs - log_rhs).abs();
    }
    let lhs = log_lhs.exp();
    let rhs = log_rhs.exp();
    (lhs - rhs).abs() / (1.0 + rhs.abs())
}

/// Max over the grid of the product-rule residual
/// `E(X) E(Y)` versus `E(X + Y + <X, Y>)`.
pub fn yor_product_check(x: &SemimartingalePath, y: &SemimartingalePath) -> Result<f64> {
    let z = x.yor_sum(y)?;
    let ex = stoch_exp_closed(x);
    let ey = stoch_exp_closed(y);
    let ez = stoch_exp_closed(&z);
    let residual = ex
        .log_values
        .iter()
        .zip(&ey.log_values)
        .zip(&ez.log_values)
        .map(|((a, b), c)| {
            // E(X) E(Y) is formed as a product, not as exp(a + b).
            let lhs = a.exp() * b.exp();
            if a + b > LOG_SPACE_THRESHOLD || *c > LOG_SPACE_THRESHOLD {
                log_pair_residual(a + b, *c)
            } else {
                let rhs = c.exp();
                (lhs - rhs).abs() / (1.0 + rhs)
            }
        })
        .fold(0.0, f64::max);
    Ok(residual)
}
