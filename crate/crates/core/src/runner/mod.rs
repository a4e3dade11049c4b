//! Suite orchestration: configuration, execution on a sized worker pool,
//! and self-contained JSON reports with CSV side files.

pub mod catalog;
pub mod config;
pub mod report;
mod suites;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

pub use catalog::{list_checks, CatalogEntry};
pub use config::{GridConfig, RunConfig, Suite, Tolerances};
pub use report::{CheckRecord, Comparison, SuiteReport, SCHEMA_VERSION};

use crate::error::Error;
use crate::kernel::ResolvedKernel;
use crate::surface::CandidateSurface;
use suites::Recorder;

/// Process exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    Unresolvable = 3,
    Io = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot resolve {0}")]
    Unresolvable(Error),
    #[error("i/o failure: {0}")]
    Io(Error),
    #[error("run aborted: {0}")]
    Compute(Error),
}

impl RunError {
    pub fn status(&self) -> ExitStatus {
        match self {
            Self::Usage(_) => ExitStatus::Usage,
            Self::Unresolvable(_) => ExitStatus::Unresolvable,
            Self::Io(_) => ExitStatus::Io,
            Self::Compute(_) => ExitStatus::Fail,
        }
    }

    fn from_run(e: Error) -> Self {
        match e {
            Error::Io(_) => Self::Io(e),
            other => Self::Compute(other),
        }
    }
}

/// Surface and kernel built from their specs.
pub struct Resolved {
    pub surface: Arc<dyn CandidateSurface>,
    pub kernel: ResolvedKernel,
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved, RunError> {
    cfg.validate().map_err(|e| RunError::Usage(e.to_string()))?;
    Ok(Resolved {
        surface: cfg.surface.build().map_err(RunError::Unresolvable)?,
        kernel: cfg.kernel.resolve().map_err(RunError::Unresolvable)?,
    })
}

fn run_part(suite: Suite, cfg: &RunConfig, resolved: &Resolved) -> crate::Result<Recorder> {
    let mut rec = Recorder::new(suite, cfg);
    match suite {
        Suite::Theorem1 => suites::theorem1(cfg, resolved.surface.as_ref(), &mut rec)?,
        Suite::Martingale => suites::martingale(cfg, resolved.surface.as_ref(), &mut rec)?,
        Suite::Pde => suites::pde(cfg, resolved.surface.as_ref(), &mut rec)?,
        Suite::Uniqueness => suites::uniqueness(cfg, &mut rec)?,
        Suite::Kernels => suites::kernels(cfg, &resolved.kernel, &mut rec)?,
        Suite::All => unreachable!("`all` is expanded into its parts"),
    }
    Ok(rec)
}

fn run_resolved(cfg: &RunConfig, resolved: &Resolved) -> crate::Result<SuiteReport> {
    let start = Instant::now();
    let parts: Vec<Suite> = match cfg.suite {
        Suite::All => Suite::PARTS.to_vec(),
        one => vec![one],
    };
    let mut checks = Vec::new();
    let mut verdicts = BTreeMap::new();
    let mut details = BTreeMap::new();
    for part in parts {
        let rec = run_part(part, cfg, resolved)?;
        checks.extend(rec.checks);
        for (k, v) in rec.verdicts {
            verdicts.insert(format!("{}/{k}", part.name()), v);
        }
        for (k, v) in rec.details {
            details.insert(format!("{}/{k}", part.name()), v);
        }
    }
    let pass = checks.iter().all(|c: &CheckRecord| !c.mandatory || c.pass);
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        suite: cfg.suite.name().to_string(),
        pass,
        runtime_seconds: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
        checks,
        verdicts,
        details,
    })
}

/// Runs the configured suite on a pool of `cfg.workers` threads (the
/// global pool when unset). Writes nothing.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteReport, RunError> {
    let resolved = resolve(cfg)?;
    let run = || run_resolved(cfg, &resolved).map_err(RunError::from_run);
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Usage(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// [`run_suite`] followed by writing the report into `cfg.out_dir`.
pub fn execute(cfg: &RunConfig) -> Result<SuiteReport, RunError> {
    let report = run_suite(cfg)?;
    if let Some(dir) = &cfg.out_dir {
        report.write_atomic(dir).map_err(RunError::Io)?;
    }
    Ok(report)
}
