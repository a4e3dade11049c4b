use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stochexp_core::runner::{self, ExitStatus, RunConfig, RunError, Suite, SuiteReport};
use stochexp_core::uniqueness::{build_substitution_matrix, nullspace_basis, write_basis_csv};

#[derive(Parser)]
#[command(name = "verify", version, about = "Run verification suites for stochastic-exponential functional equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Representation-theorem checks for the configured surface plus the counterexample witness.
    Theorem1(RunArgs),
    /// Growth exponents, martingale tests and log-normality.
    Martingale(RunArgs),
    /// Heat-equation and PDE-system residuals.
    Pde(RunArgs),
    /// Exact nullspace of the polynomial substitution operator.
    Uniqueness(RunArgs),
    /// Kernel functionals, duality and regularity diagnostics.
    Kernels(RunArgs),
    /// Every suite above.
    All(RunArgs),
    /// Print the check catalog.
    List,
    /// Print the substitution matrix and its nullspace basis as CSV.
    Matrix {
        #[arg(long, default_value_t = 6)]
        degree: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
    /// Number of time steps of the main grid.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Print the JSON report to stdout instead of a summary.
    #[arg(long)]
    json: bool,
}

fn load_config(suite: Suite, args: &RunArgs) -> Result<RunConfig, RunError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(e.into()))?;
            let mut value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
            if let (Some(seed), Some(obj)) = (args.seed, value.as_object_mut()) {
                obj.insert("seed".into(), seed.into());
            }
            serde_json::from_value::<RunConfig>(value).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?
        }
        None => {
            let seed = args
                .seed
                .ok_or_else(|| RunError::Usage("a seed is required: pass --seed or a config with \"seed\"".into()))?;
            RunConfig::new(suite, seed)
        }
    };
    cfg.suite = suite;
    if let Some(n) = args.paths {
        cfg.n_paths = n;
    }
    if let Some(n) = args.grid {
        cfg.grid.n_steps = n;
    }
    if let Some(dir) = &args.out {
        cfg.out_dir = Some(dir.clone());
    }
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    Ok(cfg)
}

fn print_summary(report: &SuiteReport) {
    for c in &report.checks {
        let status = match (c.pass, c.mandatory) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        println!(
            "{status} {:<40} {:>14.6e} {} {:<10e} {}",
            c.id,
            c.statistic,
            serde_json::to_value(c.comparison).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            c.threshold,
            c.anchor
        );
    }
    for (k, v) in &report.verdicts {
        println!("verdict {k}: {v}");
    }
    println!(
        "suite {}: {} in {:.2}s",
        report.suite,
        if report.pass { "PASS" } else { "FAIL" },
        report.runtime_seconds
    );
}

fn run(suite: Suite, args: &RunArgs) -> Result<ExitStatus, RunError> {
    let cfg = load_config(suite, args)?;
    let report = runner::execute(&cfg)?;
    if args.json {
        println!("{}", report.to_json().map_err(RunError::Io)?);
    } else {
        print_summary(&report);
    }
    Ok(if report.pass { ExitStatus::Pass } else { ExitStatus::Fail })
}

fn matrix(degree: usize) -> Result<ExitStatus, RunError> {
    let m = build_substitution_matrix(degree).map_err(|e| RunError::Usage(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    let io = |e: std::io::Error| RunError::Io(e.into());
    m.write_csv(&mut out).map_err(io)?;
    std::io::Write::write_all(&mut out, b"\n").map_err(io)?;
    write_basis_csv(&nullspace_basis(&m), &mut out).map_err(io)?;
    Ok(ExitStatus::Pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theorem1(a) => run(Suite::Theorem1, a),
        Command::Martingale(a) => run(Suite::Martingale, a),
        Command::Pde(a) => run(Suite::Pde, a),
        Command::Uniqueness(a) => run(Suite::Uniqueness, a),
        Command::Kernels(a) => run(Suite::Kernels, a),
        Command::All(a) => run(Suite::All, a),
        Command::List => {
            for e in runner::list_checks() {
                println!("{:<40} {}", e.id, e.anchor);
            }
            Ok(ExitStatus::Pass)
        }
        Command::Matrix { degree } => matrix(*degree),
    };
    let status = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.status()
    });
    ExitCode::from(status as u8)
}
