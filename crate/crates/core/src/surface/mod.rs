//! Candidate two-variable functions `f(u, v)`, `u >= 0`, evaluated at
//! `(<X>_t, X_t)`.

mod checks;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{
    check_cauchy2d, check_increment_eq, check_lob, check_single_bm, grid_ae_check,
    indicator_integrand, relative_residual, AeReport, CauchyReport, Triple,
};
pub use table::TableSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothness {
    Measurable,
    Continuous,
    Analytic,
}

/// Which equations a surface is known to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceClass {
    /// `exp(c v - c u / 2)`: solves every equation on every domain.
    Canonical,
    /// Solves the single-Brownian equation but not the increment equation.
    SingleBrownianOnly,
    /// `exp(c v + b u)` with `b != -c/2`: solves the two-variable Cauchy
    /// equation but not the single-Brownian one.
    CauchyOnly,
    Unknown,
}

/// Value and partial derivatives at `(t, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub value: f64,
    pub d_t: f64,
    pub d_x: f64,
    pub d_xx: f64,
}

pub trait CandidateSurface: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    fn smoothness(&self) -> Smoothness;

    fn eval(&self, u: f64, v: f64) -> f64;

    /// `ln f(u, v)`; overridden where it can be computed without `exp`.
    fn ln_eval(&self, u: f64, v: f64) -> f64 {
        self.eval(u, v).ln()
    }

    /// Closed-form partials, when the surface has them.
    fn partials(&self, _t: f64, _x: f64) -> Option<Partials> {
        None
    }

    fn class(&self) -> SurfaceClass {
        SurfaceClass::Unknown
    }

    /// Whether `(t, x)` lies within `tol` of a set where the surface is
    /// not differentiable.
    fn near_singularity(&self, _t: f64, _x: f64, _tol: f64) -> bool {
        false
    }
}

/// `exp(c v - (c/2) u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalSurface {
    pub c: f64,
}

impl CanonicalSurface {
    pub fn new(c: f64) -> Self {
        Self { c }
    }
}

impl CandidateSurface for CanonicalSurface {
    fn label(&self) -> String {
        format!("canonical:{}", self.c)
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Analytic
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        self.ln_eval(u, v).exp()
    }

    fn ln_eval(&self, u: f64, v: f64) -> f64 {
        self.c * v - 0.5 * self.c * u
    }

    fn partials(&self, t: f64, x: f64) -> Option<Partials> {
        let value = self.eval(t, x);
        Some(Partials {
            value,
            d_t: -0.5 * self.c * value,
            d_x: self.c * value,
            d_xx: self.c * self.c * value,
        })
    }

    fn class(&self) -> SurfaceClass {
        SurfaceClass::Canonical
    }
}

/// `exp(c v + b u)`, the general continuous solution of the two-variable
/// Cauchy equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineExponentSurface {
    pub c: f64,
    pub b: f64,
}

impl CandidateSurface for AffineExponentSurface {
    fn label(&self) -> String {
        format!("affine-exponent:{},{}", self.c, self.b)
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Analytic
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        self.ln_eval(u, v).exp()
    }

    fn ln_eval(&self, u: f64, v: f64) -> f64 {
        self.c * v + self.b * u
    }

    fn partials(&self, t: f64, x: f64) -> Option<Partials> {
        let value = self.eval(t, x);
        Some(Partials {
            value,
            d_t: self.b * value,
            d_x: self.c * value,
            d_xx: self.c * self.c * value,
        })
    }

    fn class(&self) -> SurfaceClass {
        if self.b == -0.5 * self.c {
            SurfaceClass::Canonical
        } else {
            SurfaceClass::CauchyOnly
        }
    }
}

/// `exp(|(2v - u) u|^(1/3))`: continuous, solves `f(t,x)^2 = f(4t, 2x+t)`
/// but nothing wider.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CounterexampleSurface;

impl CounterexampleSurface {
    pub fn exponent(u: f64, v: f64) -> f64 {
        ((2.0 * v - u) * u).abs().cbrt()
    }
}

impl CandidateSurface for CounterexampleSurface {
    fn label(&self) -> String {
        "counterexample".to_string()
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Continuous
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        Self::exponent(u, v).exp()
    }

    fn ln_eval(&self, u: f64, v: f64) -> f64 {
        Self::exponent(u, v)
    }

    fn class(&self) -> SurfaceClass {
        SurfaceClass::SingleBrownianOnly
    }

    /// The ridge `2x = t` where `|.|^(1/3)` has unbounded derivatives.
    fn near_singularity(&self, t: f64, x: f64, tol: f64) -> bool {
        (2.0 * x - t).abs() < tol
    }
}

type SurfaceFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Surface backed by an arbitrary closure.
#[derive(Clone)]
pub struct FnSurface {
    label: String,
    smoothness: Smoothness,
    f: Arc<SurfaceFn>,
}

impl FnSurface {
    pub fn new(
        label: impl Into<String>,
        smoothness: Smoothness,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            smoothness,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSurface").field("label", &self.label).finish()
    }
}

impl CandidateSurface for FnSurface {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        (self.f)(u, v)
    }
}

/// Gaussian density `(2 pi s)^(-1/2) exp(-x^2 / (2 s))`.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussianDensity;

impl GaussianDensity {
    pub fn eval(&self, s: f64, x: f64) -> f64 {
        (-x * x / (2.0 * s)).exp() / (2.0 * std::f64::consts::PI * s).sqrt()
    }

    /// Composite Simpson rule for the mass on `[-k sqrt(s), k sqrt(s)]`.
    pub fn mass(&self, s: f64, k_sd: f64, n_intervals: usize) -> f64 {
        let n = n_intervals + n_intervals % 2;
        let a = -k_sd * s.sqrt();
        let h = 2.0 * k_sd * s.sqrt() / n as f64;
        let mut acc = crate::stats::CompensatedSum::default();
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc.add(w * self.eval(s, a + i as f64 * h));
        }
        acc.value() * h / 3.0
    }
}

/// Surface selector used by configuration files and the command line:
/// `canonical:<c>`, `counterexample`, `affine-exponent:<c>,<b>`,
/// `table:<csv path>`. Arguments may be written as `c=1`, `c:1` or `{c:1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SurfaceSpec {
    Canonical { c: f64 },
    Counterexample,
    AffineExponent { c: f64, b: f64 },
    Table { path: PathBuf },
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<Arc<dyn CandidateSurface>> {
        Ok(match self {
            Self::Canonical { c } => Arc::new(CanonicalSurface::new(*c)),
            Self::Counterexample => Arc::new(CounterexampleSurface),
            Self::AffineExponent { c, b } => Arc::new(AffineExponentSurface { c: *c, b: *b }),
            Self::Table { path } => Arc::new(TableSurface::from_csv_file(path)?),
        })
    }
}

pub(crate) fn parse_args(what: &'static str, input: &str, args: &str) -> Result<Vec<f64>> {
    let trimmed = args.trim().trim_start_matches('{').trim_end_matches('}');
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|part| {
            let value = part.rsplit([':', '=']).next().unwrap_or(part).trim();
            value.parse::<f64>().map_err(|e| Error::Parse {
                what,
                input: input.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

impl FromStr for SurfaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let bad = |reason: &str| Error::Parse {
            what: "surface",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match name.trim() {
            "canonical" => match parse_args("surface", s, args)?.as_slice() {
                [c] => Ok(Self::Canonical { c: *c }),
                _ => Err(bad("expected one parameter c")),
            },
            "counterexample" => Ok(Self::Counterexample),
            "affine-exponent" => match parse_args("surface", s, args)?.as_slice() {
                [c, b] => Ok(Self::AffineExponent { c: *c, b: *b }),
                _ => Err(bad("expected parameters c,b")),
            },
            "table" if !args.trim().is_empty() => Ok(Self::Table {
                path: PathBuf::from(args.trim()),
            }),
            _ => Err(bad("unknown surface")),
        }
    }
}

impl TryFrom<String> for SurfaceSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SurfaceSpec> for String {
    fn from(spec: SurfaceSpec) -> Self {
        spec.to_string()
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Canonical { c } => write!(f, "canonical:{c}"),
            Self::Counterexample => write!(f, "counterexample"),
            Self::AffineExponent { c, b } => write!(f, "affine-exponent:{c},{b}"),
            Self::Table { path } => write!(f, "table:{}", path.display()),
        }
    }
}
