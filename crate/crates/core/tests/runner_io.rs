use std::fs;

use stochexp_core::kernel::KernelDef;
use stochexp_core::runner::{execute, list_checks, run_suite, ExitStatus, RunConfig, Suite, SCHEMA_VERSION};
use stochexp_core::surface::SurfaceSpec;

fn small(suite: Suite) -> RunConfig {
    let mut cfg = RunConfig::new(suite, 11);
    cfg.n_paths = 2000;
    cfg
}

#[test]
fn report_and_side_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Suite::Uniqueness);
    cfg.out_dir = Some(dir.path().to_path_buf());
    let report = execute(&cfg).unwrap();
    assert!(report.pass);

    let path = dir.path().join("report_uniqueness.json");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    assert_eq!(json["suite"], "uniqueness");
    assert_eq!(json["config"]["seed"], 11);
    assert_eq!(json["checks"].as_array().unwrap().len(), report.checks.len());

    let matrix = fs::read_to_string(dir.path().join("uniqueness/substitution_matrix.csv")).unwrap();
    assert!(matrix.starts_with("row,x,t,"));
    assert_eq!(matrix.lines().count(), 91);
    let basis = fs::read_to_string(dir.path().join("uniqueness/nullspace.csv")).unwrap();
    assert!(basis.starts_with("vector,monomial,coefficient"));

    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn every_emitted_check_is_catalogued() {
    let catalogued: Vec<&str> = list_checks().iter().map(|e| e.id).collect();
    for surface in [SurfaceSpec::Canonical { c: 1.0 }, SurfaceSpec::Counterexample] {
        let mut cfg = small(Suite::All);
        cfg.surface = surface;
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass, "{:?}", report.checks.iter().filter(|c| c.mandatory && !c.pass).collect::<Vec<_>>());
        for c in &report.checks {
            assert!(catalogued.contains(&c.id.as_str()), "{}", c.id);
        }
    }
}

#[test]
fn invalid_config_is_a_usage_error() {
    let mut cfg = small(Suite::Pde);
    cfg.n_paths = 10;
    assert_eq!(run_suite(&cfg).unwrap_err().status(), ExitStatus::Usage);
    let mut cfg = small(Suite::Pde);
    cfg.grid.n_steps = 12;
    assert_eq!(run_suite(&cfg).unwrap_err().status(), ExitStatus::Usage);
    assert!(RunConfig::from_json(r#"{"seed": 1, "surprise": true}"#).is_err());
    assert!(RunConfig::from_json(r#"{"suite": "pde"}"#).is_err());
}

#[test]
fn missing_table_is_unresolvable() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Suite::Kernels);
    cfg.kernel = KernelDef::Table { path: dir.path().join("absent.csv") };
    assert_eq!(run_suite(&cfg).unwrap_err().status(), ExitStatus::Unresolvable);
}

#[test]
fn config_round_trips_through_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"seed": 5, "suite": "kernels", "surface": "affine-exponent:1,-0.5", "kernel": "exponential:2"}"#).unwrap();
    let cfg = RunConfig::from_file(&path).unwrap();
    assert_eq!(cfg.suite, Suite::Kernels);
    assert_eq!(cfg.surface, SurfaceSpec::AffineExponent { c: 1.0, b: -0.5 });
    assert_eq!(cfg.kernel, KernelDef::Exponential { rate: 2.0 });
    let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&again).unwrap(), serde_json::to_value(&cfg).unwrap());
}
