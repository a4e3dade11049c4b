//! Time grids, Brownian paths and continuous semimartingales on a grid.
//!
//! Integrands and drifts are step functions, constant on each grid cell
//! `[t_k, t_{k+1})`, and all stochastic sums use the left endpoint. The
//! square characteristic of a semimartingale is carried exactly as the
//! running sum of `h_k^2 * step`; realized quadratic variation is only a
//! diagnostic.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{fill_standard_normal, Seed};

/// Relative tolerance used to decide whether a time lies on the grid.
const ALIGN_TOL: f64 = 1e-9;

/// Uniform discretization of `[0, horizon]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

pub fn make_grid(horizon: f64, n_steps: usize) -> Result<TimeGrid> {
    TimeGrid::new(horizon, n_steps)
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() || n_steps == 0 {
            return Err(Error::InvalidGrid { horizon, n_steps });
        }
        Ok(Self { horizon, n_steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n_steps);
        if k == self.n_steps {
            self.horizon
        } else {
            self.horizon * k as f64 / self.n_steps as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.time(k)).collect()
    }

    /// Index of a grid-aligned time.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let step = self.step();
        let k = (t / step).round();
        if !(k >= 0.0) || k > self.n_steps as f64 || (k * step - t).abs() > ALIGN_TOL * self.horizon.max(1.0)
        {
            return Err(Error::Misaligned { time: t, step });
        }
        Ok(k as usize)
    }

    /// Grid with the same horizon and `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.horizon, self.n_steps * factor)
    }
}

/// Real-valued path sampled at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct PathOnGrid {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl PathOnGrid {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                what: "path values",
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.times().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_of(t)?])
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("grid has at least two points")
    }

    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Keeps every `factor`-th point.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.grid.n_steps % factor != 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot subsample {} steps by {factor}",
                self.grid.n_steps
            )));
        }
        let grid = TimeGrid::new(self.grid.horizon, self.grid.n_steps / factor)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        Ok(Self { grid, values })
    }

    /// Debug export with columns `t,value`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.grid.times().iter().zip(&self.values) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

/// Standard Brownian motion on `grid`, a pure function of `seed`.
pub fn sample_brownian(grid: &TimeGrid, seed: Seed) -> PathOnGrid {
    let mut z = vec![0.0; grid.n_steps()];
    fill_standard_normal(seed, &mut z);
    let sd = grid.step().sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let mut w = 0.0;
    values.push(w);
    for dz in z {
        w += sd * dz;
        values.push(w);
    }
    PathOnGrid {
        grid: *grid,
        values,
    }
}

fn check_per_step(what: &'static str, xs: &[f64], grid: &TimeGrid) -> Result<()> {
    if xs.len() != grid.n_steps() {
        return Err(Error::LengthMismatch {
            what,
            expected: grid.n_steps(),
            found: xs.len(),
        });
    }
    Ok(())
}

/// Left-point Itô sums `sum_{j<k} h_j (W_{j+1} - W_j)`.
pub fn ito_integral(h: &[f64], w: &PathOnGrid) -> Result<PathOnGrid> {
    check_per_step("integrand", h, &w.grid)?;
    let mut values = Vec::with_capacity(w.grid.len());
    let mut acc = 0.0;
    values.push(acc);
    for (hk, dw) in h.iter().zip(w.increments()) {
        acc += hk * dw;
        values.push(acc);
    }
    Ok(PathOnGrid {
        grid: w.grid,
        values,
    })
}

fn running_sum(xs: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    out.push(acc);
    for x in xs {
        acc += x;
        out.push(acc);
    }
    out
}

/// `X = int h dW + int b du` together with its exact square characteristic.
#[derive(Clone, Debug)]
pub struct SemimartingalePath {
    grid: TimeGrid,
    values: Vec<f64>,
    integrand: Vec<f64>,
    drift: Vec<f64>,
    sq_char: Vec<f64>,
    driver: Arc<PathOnGrid>,
}

pub fn build_semimartingale(
    h: &[f64],
    b: &[f64],
    w: &Arc<PathOnGrid>,
) -> Result<SemimartingalePath> {
    SemimartingalePath::new(h.to_vec(), b.to_vec(), Arc::clone(w))
}

/// `<X, Y>_t = sum_{j<k} h^X_j h^Y_j * step`.
pub fn covariation(x: &SemimartingalePath, y: &SemimartingalePath) -> Result<PathOnGrid> {
    x.check_compatible(y)?;
    let step = x.grid.step();
    Ok(PathOnGrid {
        grid: x.grid,
        values: running_sum(
            x.integrand
                .iter()
                .zip(&y.integrand)
                .map(|(a, b)| a * b * step),
            x.grid.len(),
        ),
    })
}

/// Semimartingale with integrand and drift drawn uniformly from
/// `[-bound, bound]` per cell.
pub fn random_semimartingale(w: &Arc<PathOnGrid>, bound: f64, seed: Seed) -> SemimartingalePath {
    use rand::Rng;
    let mut rng = seed.rng();
    let n = w.grid.n_steps();
    let mut draw = |_| rng.gen_range(-bound..=bound);
    let h: Vec<f64> = (0..n).map(&mut draw).collect();
    let b: Vec<f64> = (0..n).map(&mut draw).collect();
    SemimartingalePath::new(h, b, Arc::clone(w)).expect("lengths match the driver grid")
}

/// Running sum of squared increments.
pub fn realized_quadratic_variation(x: &PathOnGrid) -> PathOnGrid {
    PathOnGrid {
        grid: x.grid,
        values: running_sum(x.increments().map(|d| d * d), x.grid.len()),
    }
}

impl SemimartingalePath {
    pub fn new(integrand: Vec<f64>, drift: Vec<f64>, driver: Arc<PathOnGrid>) -> Result<Self> {
        let grid = driver.grid;
        check_per_step("integrand", &integrand, &grid)?;
        check_per_step("drift", &drift, &grid)?;
        let step = grid.step();
        let values = running_sum(
            integrand
                .iter()
                .zip(&drift)
                .zip(driver.increments())
                .map(|((h, b), dw)| h * dw + b * step),
            grid.len(),
        );
        let sq_char = Self::square_characteristic(&integrand, &grid);
        Ok(Self {
            grid,
            values,
            integrand,
            drift,
            sq_char,
            driver,
        })
    }

    /// The driving Brownian motion itself.
    pub fn brownian(driver: Arc<PathOnGrid>) -> Self {
        let n = driver.grid.n_steps();
        let grid = driver.grid;
        Self {
            values: driver.values.clone(),
            integrand: vec![1.0; n],
            drift: vec![0.0; n],
            sq_char: grid.times(),
            grid,
            driver,
        }
    }

    fn square_characteristic(integrand: &[f64], grid: &TimeGrid) -> Vec<f64> {
        let step = grid.step();
        running_sum(integrand.iter().map(|h| h * h * step), grid.len())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integrand(&self) -> &[f64] {
        &self.integrand
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn sq_char(&self) -> &[f64] {
        &self.sq_char
    }

    pub fn driver(&self) -> &Arc<PathOnGrid> {
        &self.driver
    }

    pub fn path(&self) -> PathOnGrid {
        PathOnGrid {
            grid: self.grid,
            values: self.values.clone(),
        }
    }

    pub fn sq_char_path(&self) -> PathOnGrid {
        PathOnGrid {
            grid: self.grid,
            values: self.sq_char.clone(),
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if !Arc::ptr_eq(&self.driver, &other.driver) && self.driver.values != other.driver.values {
            return Err(Error::DriverMismatch);
        }
        Ok(())
    }

    fn combine(
        &self,
        other: &Self,
        value: impl Fn(usize) -> f64,
        integrand: impl Fn(f64, f64) -> f64,
        drift: impl Fn(usize) -> f64,
    ) -> Self {
        let integrand: Vec<f64> = self
            .integrand
            .iter()
            .zip(&other.integrand)
            .map(|(&a, &b)| integrand(a, b))
            .collect();
        let sq_char = Self::square_characteristic(&integrand, &self.grid);
        Self {
            grid: self.grid,
            values: (0..self.grid.len()).map(value).collect(),
            drift: (0..self.grid.n_steps()).map(drift).collect(),
            integrand,
            sq_char,
            driver: Arc::clone(&self.driver),
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.combine(
            other,
            |k| self.values[k] + other.values[k],
            |a, b| a + b,
            |k| self.drift[k] + other.drift[k],
        ))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.combine(
            other,
            |k| self.values[k] - other.values[k],
            |a, b| a - b,
            |k| self.drift[k] - other.drift[k],
        ))
    }

    /// `X + Y + <X, Y>`, the argument on the right of the product rule.
    pub fn yor_sum(&self, other: &Self) -> Result<Self> {
        let cov = covariation(self, other)?;
        Ok(self.combine(
            other,
            |k| self.values[k] + other.values[k] + cov.values[k],
            |a, b| a + b,
            |k| self.drift[k] + other.drift[k] + self.integrand[k] * other.integrand[k],
        ))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let integrand: Vec<f64> = self.integrand.iter().map(|h| alpha * h).collect();
        let sq_char = Self::square_characteristic(&integrand, &self.grid);
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| alpha * v).collect(),
            drift: self.drift.iter().map(|b| alpha * b).collect(),
            integrand,
            sq_char,
            driver: Arc::clone(&self.driver),
        }
    }

    /// `X - <X>/2`, the path the kernel functionals integrate against.
    pub fn compensated(&self) -> PathOnGrid {
        PathOnGrid {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&self.sq_char)
                .map(|(x, q)| x - 0.5 * q)
                .collect(),
        }
    }
}
