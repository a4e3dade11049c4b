use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelDef;
use crate::surface::SurfaceSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem1,
    Martingale,
    Pde,
    Uniqueness,
    Kernels,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 5] = [
        Suite::Theorem1,
        Suite::Martingale,
        Suite::Pde,
        Suite::Uniqueness,
        Suite::Kernels,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Theorem1 => "theorem1",
            Self::Martingale => "martingale",
            Self::Pde => "pde",
            Self::Uniqueness => "uniqueness",
            Self::Kernels => "kernels",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::PARTS
            .into_iter()
            .chain([Self::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse {
                what: "suite",
                input: s.to_string(),
                reason: "expected theorem1, martingale, pde, uniqueness, kernels or all".into(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub horizon: f64,
    pub n_steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            n_steps: 256,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pathwise algebraic identities.
    pub identity: f64,
    /// Closed-form PDE residuals and primal/dual agreement.
    pub exact: f64,
    /// Parameter round trips and stochastic-exponential embedding.
    pub round_trip: f64,
    /// Minimum residual ratio per halving of both spacings.
    pub convergence_ratio: f64,
    /// Allowed distance of fitted Kolmogorov exponents from 2 and 1.
    pub kolmogorov: f64,
    /// Minimum total-variation growth per dyadic level.
    pub divergence_ratio: f64,
    /// Minimum Cauchy residual at the counterexample witness triple.
    pub witness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-11,
            exact: 1e-10,
            round_trip: 1e-12,
            convergence_ratio: 3.5,
            kolmogorov: 0.15,
            divergence_ratio: 1.3,
            witness: 1.0,
        }
    }
}

fn default_surface() -> SurfaceSpec {
    SurfaceSpec::Canonical { c: 1.0 }
}

fn default_kernel() -> KernelDef {
    KernelDef::Triangular
}

fn default_paths() -> usize {
    100_000
}

fn default_degree() -> usize {
    crate::uniqueness::MAX_DEGREE
}

fn default_suite() -> Suite {
    Suite::All
}

/// Everything a run depends on. Serialized verbatim into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_suite")]
    pub suite: Suite,
    #[serde(default = "default_surface")]
    pub surface: SurfaceSpec,
    #[serde(default = "default_kernel")]
    pub kernel: KernelDef,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    pub seed: u64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        Self {
            suite,
            surface: default_surface(),
            kernel: default_kernel(),
            grid: GridConfig::default(),
            n_paths: default_paths(),
            seed,
            degree: default_degree(),
            tolerances: Tolerances::default(),
            out_dir: None,
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.grid.horizon > 0.0) || self.grid.n_steps == 0 {
            return Err(Error::InvalidGrid {
                horizon: self.grid.horizon,
                n_steps: self.grid.n_steps,
            });
        }
        if self.grid.n_steps % 8 != 0 {
            return bad(format!("n_steps must be a multiple of 8, got {}", self.grid.n_steps));
        }
        if self.n_paths < 1000 {
            return bad(format!("n_paths must be at least 1000, got {}", self.n_paths));
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if !(1..=crate::uniqueness::MAX_DEGREE).contains(&self.degree) {
            return Err(Error::DegreeOutOfRange(self.degree));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        assert!(RunConfig::from_json(r#"{"suite": "pde"}"#).is_err());
        let cfg = RunConfig::from_json(r#"{"suite": "pde", "seed": 7}"#).unwrap();
        assert_eq!(cfg, RunConfig::new(Suite::Pde, 7));
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = RunConfig::new(Suite::Theorem1, 3);
        cfg.surface = "counterexample".parse().unwrap();
        cfg.kernel = "exponential:2".parse().unwrap();
        cfg.tolerances.identity = 1e-9;
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_json(r#"{"seed": 1, "suite": "nope"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"seed": 1, "surface": "sphere"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"seed": 1, "grid": {"horizon": 1, "n_steps": 12}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"seed": 1, "n_paths": 10}"#).is_err());
        assert!(RunConfig::from_json(r#"{"seed": 1, "degree": 13}"#).is_err());
        assert!(RunConfig::from_json(r#"{"seed": 1, "colour": "red"}"#).is_err());
    }

    #[test]
    fn suite_names() {
        for s in Suite::PARTS.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("theorem2".parse::<Suite>().is_err());
    }
}
