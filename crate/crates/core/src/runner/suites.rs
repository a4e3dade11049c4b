use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::catalog;
use super::config::{RunConfig, Suite};
use super::report::{round_stat, CheckRecord, Comparison};
use crate::error::Result;
use crate::kernel::{
    additivity_check, check_fex2, continuity_modulus, dyadic_separations, eval_f, eval_h, eval_h_dual,
    kolmogorov_modulus, rough_scalar_kernel_demo, weierstrass, KernelDef, KernelSpec, ResolvedKernel,
    ROUGH_VERDICT,
};
use crate::martingale::{
    bernstein_normality_test, check_form21_martingale, estimate_lambda, heavy_tail_horizon, holder_check,
    log_moments, martingale_test, MartingaleTestReport,
};
use crate::path::{make_grid, random_semimartingale, sample_brownian, PathOnGrid, SemimartingalePath, TimeGrid};
use crate::pde::{
    eq_system_residuals, heat_convergence, heat_residual, recover_params, Derivatives, RectGrid,
};
use crate::rng::Seed;
use crate::stoch_exp::{stoch_exp_closed, yor_product_check};
use crate::surface::{
    check_cauchy2d, check_increment_eq, check_lob, check_single_bm, grid_ae_check, Triple,
};
use crate::surface::{CandidateSurface, CanonicalSurface, CounterexampleSurface, SurfaceClass, SurfaceSpec};
use crate::uniqueness::{
    build_substitution_matrix, derivative_cascade_check, layer_ranks, nullspace_basis, write_basis_csv,
    BivariatePoly,
};

/// Random pairs per pathwise battery.
const PAIRS: usize = 100;
const KERNEL_PAIRS: usize = 50;
const CAUCHY_TRIPLES: usize = 1000;
const INCREMENT_STEPS: usize = 16;
const INCREMENT_PATHS: u64 = 10;
const AE_CELLS: usize = 200;
const KOLMOGOROV_STEPS: usize = 1 << 12;
const ROUGH_LEVELS: std::ops::RangeInclusive<u32> = 6..=12;
const CANONICAL_BATTERY: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
const INTEGRAND_BOUND: f64 = 2.0;

/// Seed tags, one per independent random input.
mod tag {
    pub const YOR: u64 = 1;
    pub const LOB: u64 = 2;
    pub const INCREMENT: u64 = 3;
    pub const CAUCHY: u64 = 4;
    pub const SINGLE_BM: u64 = 5;
    pub const WITNESS: u64 = 6;
    pub const HORIZON: u64 = 10;
    pub const LAMBDA: u64 = 11;
    pub const N1: u64 = 12;
    pub const N2: u64 = 13;
    pub const FORM21: u64 = 14;
    pub const NORMALITY: u64 = 15;
    pub const MOMENTS: u64 = 16;
    pub const PDE_LAMBDA: u64 = 20;
    pub const EMBEDDING: u64 = 30;
    pub const FEX2: u64 = 31;
    pub const DUALITY: u64 = 32;
    pub const ROUGH: u64 = 33;
}

pub(crate) struct Recorder {
    suite: Suite,
    seed: Seed,
    out_dir: Option<PathBuf>,
    pub(crate) checks: Vec<CheckRecord>,
    pub(crate) verdicts: BTreeMap<String, String>,
    pub(crate) details: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Expect {
    Holds,
    Violated,
    Unknown,
}

impl Recorder {
    pub(crate) fn new(suite: Suite, cfg: &RunConfig) -> Self {
        Self {
            suite,
            seed: Seed::new(cfg.seed, 0).derive(suite as u64),
            out_dir: cfg.out_dir.as_ref().map(|d| d.join(suite.name())),
            checks: Vec::new(),
            verdicts: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    fn seed(&self, tag: u64) -> Seed {
        self.seed.derive(tag)
    }

    fn record(&mut self, id: &str, statistic: f64, comparison: Comparison, threshold: f64, mandatory: bool) -> bool {
        let id = format!("{}/{id}", self.suite.name());
        let anchor = catalog::anchor(&id).unwrap_or_else(|| panic!("check `{id}` missing from the catalog"));
        let pass = comparison.holds(statistic, threshold);
        self.checks.push(CheckRecord {
            id,
            anchor: anchor.to_string(),
            statistic: round_stat(statistic),
            comparison,
            threshold,
            pass,
            mandatory,
        });
        pass
    }

    /// Records `statistic <= threshold`, turning it into a mandatory
    /// detected-violation check when the equation is expected to fail.
    fn expect(&mut self, id: &str, statistic: f64, threshold: f64, expect: Expect) -> bool {
        let holds = self.record(id, statistic, Comparison::AtMost, threshold, expect == Expect::Holds);
        match expect {
            Expect::Holds => holds,
            Expect::Violated => self.record(&format!("{id}-violated"), statistic, Comparison::Above, threshold, true),
            Expect::Unknown => true,
        }
    }

    fn detail(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.details.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    fn side_file(&self, name: &str, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        if let Some(dir) = &self.out_dir {
            fs::create_dir_all(dir)?;
            let mut out = BufWriter::new(fs::File::create(dir.join(name))?);
            write(&mut out)?;
            out.flush()?;
        }
        Ok(())
    }
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn driver(grid: &TimeGrid, seed: Seed) -> Arc<PathOnGrid> {
    Arc::new(sample_brownian(grid, seed))
}

fn random_pair(grid: &TimeGrid, seed: Seed, i: u64) -> (SemimartingalePath, SemimartingalePath) {
    let w = driver(grid, seed.derive(0).path(i));
    let x = random_semimartingale(&w, INTEGRAND_BOUND, seed.derive(1).path(i));
    let y = random_semimartingale(&w, INTEGRAND_BOUND, seed.derive(2).path(i));
    (x, y)
}

fn config_grid(cfg: &RunConfig) -> Result<TimeGrid> {
    make_grid(cfg.grid.horizon, cfg.grid.n_steps)
}

/// `(lambda1, lambda2)` in closed form, when known.
fn closed_form_lambdas(spec: &SurfaceSpec) -> Option<(f64, f64)> {
    match *spec {
        SurfaceSpec::Canonical { c } => Some(((c * c - c) / 2.0, 2.0 * c * c - c)),
        SurfaceSpec::AffineExponent { c, b } => Some((c * c / 2.0 + b, 2.0 * c * c + 2.0 * b)),
        _ => None,
    }
}

pub(crate) fn theorem1(cfg: &RunConfig, f: &dyn CandidateSurface, rec: &mut Recorder) -> Result<()> {
    let tol = cfg.tolerances.identity;
    let grid = config_grid(cfg)?;

    let yor_seed = rec.seed(tag::YOR);
    let mut yor = 0.0_f64;
    for i in 0..PAIRS as u64 {
        let (x, y) = random_pair(&grid, yor_seed, i);
        yor = yor.max(yor_product_check(&x, &y)?);
    }
    rec.record("yor-identity", yor, Comparison::AtMost, tol, true);

    let class = f.class();
    let expect = |holds_for: &[SurfaceClass]| match class {
        SurfaceClass::Unknown => Expect::Unknown,
        c if holds_for.contains(&c) => Expect::Holds,
        _ => Expect::Violated,
    };
    use SurfaceClass::{Canonical, CauchyOnly, SingleBrownianOnly};

    let lob_seed = rec.seed(tag::LOB);
    let mut lob = 0.0_f64;
    for i in 0..PAIRS as u64 {
        let (x, y) = random_pair(&grid, lob_seed, i);
        lob = lob.max(max(check_lob(f, &x, &y)?));
    }
    let mut surface_ok = rec.expect("lob", lob, tol, expect(&[Canonical]));

    let coarse = make_grid(cfg.grid.horizon, INCREMENT_STEPS)?;
    let inc_seed = rec.seed(tag::INCREMENT);
    let mut increment = 0.0_f64;
    for p in 0..INCREMENT_PATHS {
        let w = sample_brownian(&coarse, inc_seed.path(p));
        for i in 0..coarse.len() {
            for j in i..coarse.len() {
                increment = increment.max(check_increment_eq(f, coarse.time(i), coarse.time(j), &w)?);
            }
        }
    }
    surface_ok &= rec.expect("increment", increment, tol, expect(&[Canonical, CauchyOnly]));

    let mut rng = rec.seed(tag::CAUCHY).rng();
    let triples: Vec<Triple> = (0..CAUCHY_TRIPLES)
        .map(|_| {
            let s = rng.gen_range(0.05..=2.0);
            Triple {
                s,
                t: s + rng.gen_range(0.0..=2.0),
                x: rng.gen_range(-3.0..=3.0),
                y: rng.gen_range(-3.0..=3.0),
            }
        })
        .collect();
    let cauchy = check_cauchy2d(f, &triples)?;
    if let Some(i) = cauchy.worst {
        rec.detail("cauchy2d_worst_triple", triples[i])?;
    }
    surface_ok &= rec.expect("cauchy2d", cauchy.max_residual(), tol, expect(&[Canonical, CauchyOnly]));

    let bm_seed = rec.seed(tag::SINGLE_BM);
    let mut single = 0.0_f64;
    for i in 0..PAIRS as u64 {
        single = single.max(max(check_single_bm(f, &sample_brownian(&grid, bm_seed.path(i)))?));
    }
    surface_ok &= rec.expect("single-bm", single, tol, expect(&[Canonical, SingleBrownianOnly]));

    let ae = grid_ae_check(f, 1.0, 2.0, AE_CELLS)?;
    rec.detail("ae", ae)?;
    surface_ok &= rec.expect("ae-fraction", ae.fraction, 0.0, expect(&[Canonical, CauchyOnly]));

    let ce = CounterexampleSurface;
    let w_seed = rec.seed(tag::WITNESS);
    let mut witness_bm = 0.0_f64;
    for i in 0..PAIRS as u64 {
        witness_bm = witness_bm.max(max(check_single_bm(&ce, &sample_brownian(&grid, w_seed.path(i)))?));
    }
    let triple = Triple { s: 1.0, t: 2.0, x: 1.0, y: 0.0 };
    let witness_cauchy = check_cauchy2d(&ce, &[triple])?.max_residual();
    let confirmed = rec.record("witness-single-bm", witness_bm, Comparison::AtMost, tol, true)
        & rec.record("witness-cauchy", witness_cauchy, Comparison::AtLeast, cfg.tolerances.witness, true);
    let witness = if confirmed {
        "counterexample confirmed"
    } else {
        "counterexample not confirmed"
    };
    rec.verdicts.insert("witness".into(), witness.into());

    let surface = match class {
        _ if !surface_ok => "expectations not met",
        Canonical => "canonical solution confirmed",
        SingleBrownianOnly => "counterexample confirmed",
        CauchyOnly => "solves the Cauchy equation only",
        SurfaceClass::Unknown => "informational only",
    };
    rec.verdicts.insert("surface".into(), surface.into());
    Ok(())
}

pub(crate) fn martingale(cfg: &RunConfig, f: &dyn CandidateSurface, rec: &mut Recorder) -> Result<()> {
    let n = cfg.n_paths;
    let horizon = heavy_tail_horizon(f, cfg.grid.horizon, n, rec.seed(tag::HORIZON))?;
    let grid = make_grid(horizon, 8)?;
    rec.detail("horizon", horizon)?;

    let est = estimate_lambda(f, &grid, n, rec.seed(tag::LAMBDA))?;
    rec.side_file("lambda_curve.csv", |out| est.write_curve_csv(out))?;
    rec.detail("lambda", &est)?;
    if let Some((l1, l2)) = closed_form_lambdas(&cfg.surface) {
        rec.record("lambda1", (est.lambda1 - l1).abs(), Comparison::AtMost, est.half_width1, true);
        rec.record("lambda2", (est.lambda2 - l2).abs(), Comparison::AtMost, est.half_width2, true);
    }
    let holder = holder_check(&est);
    rec.detail("holder", holder)?;
    rec.record("holder", holder.margin, Comparison::AtLeast, -holder.tolerance, true);

    let canonical = f.class() == SurfaceClass::Canonical;
    let martingale = |rec: &mut Recorder, id: &str, report: MartingaleTestReport| -> Result<()> {
        rec.record(id, report.max_abs_z(), Comparison::AtMost, report.z_crit, canonical);
        rec.detail(id, &report)
    };
    martingale(rec, "martingale-n1", martingale_test(f, est.lambda1, 1, &grid, n, rec.seed(tag::N1))?)?;
    martingale(rec, "martingale-n2", martingale_test(f, est.lambda2, 2, &grid, n, rec.seed(tag::N2))?)?;
    martingale(
        rec,
        "martingale-form21",
        check_form21_martingale(f, est.lambda2, &grid, n, rec.seed(tag::FORM21))?,
    )?;

    let normal = bernstein_normality_test(f, horizon, n, rec.seed(tag::NORMALITY))?;
    let score = if normal.degenerate {
        0.0
    } else {
        let mut s = (normal.skewness.abs() / (4.0 * normal.skewness_stderr))
            .max(normal.excess_kurtosis.abs() / (4.0 * normal.kurtosis_stderr));
        if let Some(c) = normal.correlation {
            s = s.max(c.abs() / normal.correlation_bound);
        }
        s
    };
    let expect = match f.class() {
        SurfaceClass::Canonical | SurfaceClass::CauchyOnly => Expect::Holds,
        SurfaceClass::SingleBrownianOnly => Expect::Violated,
        SurfaceClass::Unknown => Expect::Unknown,
    };
    rec.expect("normality", score, 1.0, expect);
    rec.detail("normality", &normal)?;

    let moments = log_moments(f, horizon, n, rec.seed(tag::MOMENTS))?;
    let finite = moments.iter().filter(|(_, m)| m.is_finite()).count();
    rec.record("log-moments", finite as f64, Comparison::AtLeast, moments.len() as f64, true);
    rec.detail("log_moments", moments)?;
    Ok(())
}

fn heat_base() -> Result<RectGrid> {
    RectGrid::new(0.25, 0.75, -1.0, 1.0, 8, 16)
}

pub(crate) fn pde(cfg: &RunConfig, f: &dyn CandidateSurface, rec: &mut Recorder) -> Result<()> {
    let tol = cfg.tolerances;
    let u = CanonicalSurface::new(1.0);
    let base = heat_base()?;
    let conv = heat_convergence(&u, 0.0, 1, &base, 3)?;
    rec.record(
        "heat-convergence",
        conv.ratios.iter().copied().fold(f64::INFINITY, f64::min),
        Comparison::AtLeast,
        tol.convergence_ratio,
        true,
    );
    rec.detail("heat_convergence", &conv)?;
    let finest = base.halved().halved().halved();
    let field = heat_residual(&u, 0.0, 1, &finest)?;
    rec.side_file("heat_residual.csv", |out| field.write_csv(out))?;
    let wrong = heat_convergence(&u, 0.3, 1, &base, 3)?;
    rec.record(
        "heat-wrong-lambda",
        wrong.max_norms.iter().copied().fold(f64::INFINITY, f64::min),
        Comparison::AtLeast,
        0.1,
        true,
    );

    let (mut e1, mut e2, mut e3, mut gap, mut round_trip) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for c in CANONICAL_BATTERY {
        let s = CanonicalSurface::new(c);
        let (l1, l2) = ((c * c - c) / 2.0, 2.0 * c * c - c);
        let exact = eq_system_residuals(&s, l1, l2, &base, Derivatives::Analytic)?;
        e1 = e1.max(exact.linear.max_norm);
        e2 = e2.max(exact.quadratic.max_norm);
        e3 = e3.max(exact.gradient.max_norm);
        gap = gap.max(eq_system_residuals(&s, l1, l2, &base, Derivatives::FiniteDifference)?.substitution_gap);
        let r = recover_params(l1, l2, tol.round_trip)?;
        round_trip = round_trip.max(match r.selected {
            Some(sel) => (sel - c).abs().max((r.b + sel / 2.0).abs()),
            None => f64::INFINITY,
        });
    }
    rec.record("eq1-analytic", e1, Comparison::AtMost, tol.exact, true);
    rec.record("eq2-analytic", e2, Comparison::AtMost, tol.exact, true);
    rec.record("eq3-analytic", e3, Comparison::AtMost, tol.exact, true);
    rec.record("substitution-identity", gap, Comparison::AtMost, tol.exact, true);
    rec.record("recover-params", round_trip, Comparison::AtMost, tol.round_trip, true);

    match closed_form_lambdas(&cfg.surface) {
        Some((l1, l2)) => {
            let r = eq_system_residuals(f, l1, l2, &base, Derivatives::Analytic)?;
            rec.record("surface-eq1", r.linear.max_norm, Comparison::AtMost, tol.exact, true);
            rec.record("surface-eq2", r.quadratic.max_norm, Comparison::AtMost, tol.exact, true);
            rec.record("surface-eq3", r.gradient.max_norm, Comparison::AtMost, tol.exact, true);
            let params = recover_params(l1, l2, tol.round_trip)?;
            rec.detail("surface_params", params)?;
            let expect = if f.class() == SurfaceClass::Canonical {
                Expect::Holds
            } else {
                Expect::Violated
            };
            rec.expect("surface-b-minus-half-c", params.mismatch, tol.round_trip, expect);
        }
        None => {
            let horizon = heavy_tail_horizon(f, cfg.grid.horizon, cfg.n_paths, rec.seed(tag::HORIZON))?;
            let est = estimate_lambda(f, &make_grid(horizon, 8)?, cfg.n_paths, rec.seed(tag::PDE_LAMBDA))?;
            let mut g = RectGrid::new(0.25, 0.75, -1.5, 1.5, 16, 48)?;
            let mut norms = Vec::new();
            for _ in 0..3 {
                norms.push(heat_residual(f, est.lambda1, 1, &g)?.max_norm);
                g = g.halved();
            }
            rec.record("surface-fd-linear", norms[2], Comparison::AtMost, 1e-3, false);
            rec.detail("surface_fd_linear_norms", norms)?;
        }
    }
    Ok(())
}

pub(crate) fn uniqueness(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let d_max = cfg.degree;
    let mut bad_dimension = 0usize;
    let mut bad_basis = 0usize;
    let mut not_leading = 0usize;
    let mut previous: Option<crate::uniqueness::SubstitutionMatrix> = None;
    let mut last = None;
    for d in 1..=d_max {
        let m = build_substitution_matrix(d)?;
        let basis = nullspace_basis(&m);
        let expected = BivariatePoly::x_minus_half_t(d)?;
        bad_dimension += usize::from(basis.len() != 1);
        bad_basis += usize::from(basis.first() != Some(&expected));
        if let Some(p) = &previous {
            not_leading += usize::from(!p.is_leading_block_of(&m));
        }
        previous = Some(m.clone());
        last = Some((m, basis));
    }
    let (m, basis) = last.expect("degree range is non-empty");
    rec.record("nullspace-dimension", bad_dimension as f64, Comparison::AtMost, 0.0, true);
    rec.record("nullspace-basis", bad_basis as f64, Comparison::AtMost, 0.0, true);
    let cascade = basis.first().map(derivative_cascade_check);
    rec.record(
        "cascade",
        f64::from(u8::from(!cascade.as_ref().is_some_and(|c| c.pass))),
        Comparison::AtMost,
        0.0,
        true,
    );
    let ranks = layer_ranks(&m);
    let singular = ranks.iter().filter(|l| l.degree >= 2 && l.rank < l.size).count();
    rec.record("layer-invertibility", singular as f64, Comparison::AtMost, 0.0, true);
    rec.record("leading-block", not_leading as f64, Comparison::AtMost, 0.0, true);
    rec.record("dyadic-denominators", f64::from(u8::from(!m.dyadic())), Comparison::AtMost, 0.0, true);
    rec.detail("degree", d_max)?;
    rec.detail("basis", basis.iter().map(|b| b.to_string()).collect::<Vec<_>>())?;
    rec.detail("cascade", cascade)?;
    rec.detail("layer_ranks", ranks)?;
    rec.side_file("substitution_matrix.csv", |out| m.write_csv(out))?;
    rec.side_file("nullspace.csv", |out| write_basis_csv(&basis, out))?;
    Ok(())
}

fn battery() -> [KernelDef; 4] {
    [
        KernelDef::Unit,
        KernelDef::Triangular,
        KernelDef::Exponential { rate: 1.0 },
        KernelDef::RoughWeierstrass { terms: 12 },
    ]
}

fn fex2_over_grid(k: &KernelSpec, grid: &TimeGrid, seed: Seed, pairs: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in 0..pairs as u64 {
        let (x, y) = random_pair(grid, seed, i);
        for j in 0..grid.len() {
            worst = worst.max(check_fex2(k, &x, &y, grid.time(j))?);
        }
    }
    Ok(worst)
}

fn duality_over_grid(k: &KernelSpec, grid: &TimeGrid, seed: Seed, paths: usize) -> Result<f64> {
    let g = k.riesz_measure();
    let mut worst = 0.0_f64;
    for i in 0..paths as u64 {
        let w = random_semimartingale(&driver(grid, seed.derive(0).path(i)), INTEGRAND_BOUND, seed.derive(1).path(i))
            .compensated();
        for j in 0..grid.len() {
            let t = grid.time(j);
            worst = worst.max((eval_h(k, &w, t)? - eval_h_dual(&g, &w, t)?).abs());
        }
    }
    Ok(worst)
}

pub(crate) fn kernels(cfg: &RunConfig, kernel: &ResolvedKernel, rec: &mut Recorder) -> Result<()> {
    let tol = cfg.tolerances;
    let grid = config_grid(cfg)?;

    let unit = ResolvedKernel::Closed(KernelDef::Unit).sample(&grid)?;
    let emb_seed = rec.seed(tag::EMBEDDING);
    let mut embedding = 0.0_f64;
    for i in 0..PAIRS as u64 {
        let x = random_semimartingale(&driver(&grid, emb_seed.derive(0).path(i)), INTEGRAND_BOUND, emb_seed.derive(1).path(i));
        let e = stoch_exp_closed(&x);
        for j in 0..grid.len() {
            embedding = embedding.max((eval_f(&unit, &x, grid.time(j))?.log_value - e.log_values()[j]).abs());
        }
    }
    rec.record("embedding", embedding, Comparison::AtMost, tol.round_trip, true);

    let (mut fex2, mut duality, mut round_trip, mut additivity) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for def in battery() {
        let k = ResolvedKernel::Closed(def).sample(&grid)?;
        fex2 = fex2.max(fex2_over_grid(&k, &grid, rec.seed(tag::FEX2), KERNEL_PAIRS)?);
        duality = duality.max(duality_over_grid(&k, &grid, rec.seed(tag::DUALITY), KERNEL_PAIRS)?);
        let back = k.riesz_measure().to_kernel();
        for i in 0..grid.len() {
            for j in 0..i {
                round_trip = round_trip.max((back.value(i, j) - k.value(i, j)).abs());
            }
        }
        for i in 0..KERNEL_PAIRS as u64 {
            let (x, y) = random_pair(&grid, rec.seed(tag::FEX2), i);
            additivity = additivity.max(additivity_check(&k, &x.path(), &y.path(), grid.horizon())?);
        }
    }
    rec.record("fex2", fex2, Comparison::AtMost, tol.identity, true);
    rec.record("duality", duality, Comparison::AtMost, tol.exact, true);
    rec.record("riesz-round-trip", round_trip, Comparison::AtMost, tol.round_trip, true);
    rec.record("additivity", additivity, Comparison::AtMost, tol.identity, true);

    let moduli = [64usize, 256, 1024]
        .iter()
        .map(|&n| {
            let g = make_grid(cfg.grid.horizon, n)?;
            let k = ResolvedKernel::Closed(KernelDef::Triangular).sample(&g)?;
            continuity_modulus(&k, &PathOnGrid::from_fn(g, f64::sin))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst_ratio = moduli.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    rec.record("continuity-modulus", worst_ratio, Comparison::Below, 1.0, true);
    rec.detail("continuity_moduli", moduli)?;

    let fine = make_grid(cfg.grid.horizon, KOLMOGOROV_STEPS)?;
    let seps = dyadic_separations(cfg.grid.horizon);
    let base = cfg.grid.horizon / 2.0;
    let tri = kolmogorov_modulus(&ResolvedKernel::Closed(KernelDef::Triangular).sample(&fine)?, base, &seps)?;
    rec.record("kolmogorov-triangular", (tri.alpha - 2.0).abs(), Comparison::AtMost, tol.kolmogorov, true);
    let ind = kolmogorov_modulus(&ResolvedKernel::Closed(KernelDef::Unit).sample(&fine)?, base, &seps)?;
    rec.record("kolmogorov-indicator", (ind.alpha - 1.0).abs(), Comparison::AtMost, tol.kolmogorov, true);
    let zero = kolmogorov_modulus(&KernelSpec::zero(fine), base, &seps)?;
    rec.record(
        "kolmogorov-zero",
        f64::from(u8::from(!(zero.vacuous && zero.satisfied))),
        Comparison::AtMost,
        0.0,
        true,
    );
    rec.detail("kolmogorov_triangular", &tri)?;
    rec.detail("kolmogorov_indicator", &ind)?;

    let levels: Vec<u32> = ROUGH_LEVELS.collect();
    let rough_grid = make_grid(1.0, 1 << ROUGH_LEVELS.end())?;
    let w = driver(&rough_grid, rec.seed(tag::ROUGH));
    let rough = rough_scalar_kernel_demo(weierstrass(12), &w, &levels)?;
    rec.record("rough-fex2", rough.fex2_residual, Comparison::AtMost, tol.identity, true);
    rec.record(
        "rough-variation-growth",
        rough.variation_ratios.iter().copied().fold(f64::INFINITY, f64::min),
        Comparison::AtLeast,
        tol.divergence_ratio,
        true,
    );
    rec.record(
        "rough-verdict",
        f64::from(u8::from(rough.verdict != ROUGH_VERDICT)),
        Comparison::AtMost,
        0.0,
        true,
    );
    rec.verdicts.insert("rough-kernel".into(), rough.verdict.clone());
    rec.side_file("rough_variation.csv", |out| {
        writeln!(out, "level,total_variation,realized_qv")?;
        for ((l, v), q) in rough.levels.iter().zip(&rough.variations).zip(&rough.quadratic_variations) {
            writeln!(out, "{l},{v},{q}")?;
        }
        Ok(())
    })?;
    rec.detail("rough", &rough)?;

    let k = kernel.sample(&grid)?;
    rec.record(
        "configured-fex2",
        fex2_over_grid(&k, &grid, rec.seed(tag::FEX2), KERNEL_PAIRS)?,
        Comparison::AtMost,
        tol.identity,
        true,
    );
    rec.record(
        "configured-duality",
        duality_over_grid(&k, &grid, rec.seed(tag::DUALITY), KERNEL_PAIRS)?,
        Comparison::AtMost,
        tol.exact,
        true,
    );
    let conf = kolmogorov_modulus(&kernel.sample(&fine)?, base, &seps)?;
    rec.record("configured-kolmogorov", conf.alpha, Comparison::AtLeast, 1.9, false);
    rec.detail("kolmogorov_configured", &conf)?;
    Ok(())
}
