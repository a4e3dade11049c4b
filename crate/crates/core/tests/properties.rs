use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use stochexp_core::kernel::{additivity_check, eval_h, eval_h_dual, KernelSpec};
use stochexp_core::path::{
    covariation, ito_integral, make_grid, random_semimartingale, sample_brownian, SemimartingalePath,
    TimeGrid,
};
use stochexp_core::pde::recover_params;
use stochexp_core::rng::Seed;
use stochexp_core::stoch_exp::{stoch_exp_closed, yor_product_check};
use stochexp_core::surface::{check_cauchy2d, check_single_bm, CandidateSurface, CanonicalSurface, Triple};
use stochexp_core::uniqueness::{build_substitution_matrix, monomials, BivariatePoly};

const STEPS: usize = 64;

fn grid() -> TimeGrid {
    make_grid(1.0, STEPS).unwrap()
}

fn pair(seed: u64, bound: f64) -> (SemimartingalePath, SemimartingalePath) {
    let s = Seed::new(seed, 0);
    let w = Arc::new(sample_brownian(&grid(), s.derive(0)));
    (
        random_semimartingale(&w, bound, s.derive(1)),
        random_semimartingale(&w, bound, s.derive(2)),
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ito_sum_is_linear_in_the_integrand(
        seed in any::<u64>(),
        a in -3.0..3.0_f64,
        b in -3.0..3.0_f64,
        h1 in prop::collection::vec(-2.0..2.0_f64, STEPS),
        h2 in prop::collection::vec(-2.0..2.0_f64, STEPS),
    ) {
        let w = sample_brownian(&grid(), Seed::new(seed, 0));
        let mixed: Vec<f64> = h1.iter().zip(&h2).map(|(x, y)| a * x + b * y).collect();
        let lhs = ito_integral(&mixed, &w).unwrap();
        let i1 = ito_integral(&h1, &w).unwrap();
        let i2 = ito_integral(&h2, &w).unwrap();
        for k in 0..=STEPS {
            prop_assert!(close(lhs.values()[k], a * i1.values()[k] + b * i2.values()[k], 1e-12));
        }
    }

    #[test]
    fn ito_sum_matches_left_point_oracle(seed in any::<u64>(), h in prop::collection::vec(-2.0..2.0_f64, STEPS)) {
        let w = sample_brownian(&grid(), Seed::new(seed, 0));
        let got = ito_integral(&h, &w).unwrap();
        let v = w.values();
        let mut acc = 0.0;
        for k in 0..STEPS {
            acc += h[k] * (v[k + 1] - v[k]);
            prop_assert!(close(got.values()[k + 1], acc, 1e-12));
        }
    }

    #[test]
    fn covariation_polarizes(seed in any::<u64>(), bound in 0.1..3.0_f64) {
        let (x, y) = pair(seed, bound);
        let cov = covariation(&x, &y).unwrap();
        let plus = x.plus(&y).unwrap();
        let minus = x.minus(&y).unwrap();
        for k in 0..=STEPS {
            let polar = (plus.sq_char()[k] - minus.sq_char()[k]) / 4.0;
            prop_assert!(close(cov.values()[k], polar, 1e-12));
        }
    }

    #[test]
    fn square_characteristic_matches_riemann_oracle(seed in any::<u64>(), bound in 0.1..3.0_f64) {
        let (x, _) = pair(seed, bound);
        let dt = 1.0 / STEPS as f64;
        let mut acc = 0.0;
        for k in 0..STEPS {
            acc += x.integrand()[k].powi(2) * dt;
            prop_assert!(close(x.sq_char()[k + 1], acc, 1e-12));
        }
    }

    #[test]
    fn closed_exponential_is_compensated_exp(seed in any::<u64>(), bound in 0.1..2.0_f64) {
        let (x, _) = pair(seed, bound);
        let e = stoch_exp_closed(&x);
        for k in 0..=STEPS {
            prop_assert!(close(e.log_values()[k], x.values()[k] - 0.5 * x.sq_char()[k], 1e-12));
        }
    }

    #[test]
    fn product_rule_holds_pathwise(seed in any::<u64>(), bound in 0.1..2.0_f64) {
        let (x, y) = pair(seed, bound);
        prop_assert!(yor_product_check(&x, &y).unwrap() <= 1e-11);
    }

    #[test]
    fn canonical_surfaces_solve_cauchy_and_single_bm(
        c in -2.0..2.0_f64,
        s in 0.01..2.0_f64,
        gap in 0.0..2.0_f64,
        x in -3.0..3.0_f64,
        y in -3.0..3.0_f64,
        seed in any::<u64>(),
    ) {
        let f = CanonicalSurface::new(c);
        prop_assert!(close(f.eval(s, x), (c * x - c * s / 2.0).exp(), 1e-13));
        let report = check_cauchy2d(&f, &[Triple { s, t: s + gap, x, y }]).unwrap();
        prop_assert!(report.max_residual() <= 1e-11);
        let w = sample_brownian(&grid(), Seed::new(seed, 0));
        prop_assert!(check_single_bm(&f, &w).unwrap().into_iter().all(|r| r <= 1e-11));
    }

    #[test]
    fn kernel_functional_is_additive(seed in any::<u64>(), rows in prop::collection::vec(-2.0..2.0_f64, STEPS * (STEPS + 1) / 2)) {
        let g = grid();
        let k = dense_kernel(g, &rows);
        let (x, y) = pair(seed, 1.0);
        for i in [1, STEPS / 2, STEPS] {
            prop_assert!(additivity_check(&k, &x.path(), &y.path(), g.time(i)).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn primal_and_dual_evaluations_agree(seed in any::<u64>(), rows in prop::collection::vec(-2.0..2.0_f64, STEPS * (STEPS + 1) / 2)) {
        let g = grid();
        let k = dense_kernel(g, &rows);
        let riesz = k.riesz_measure();
        let (x, _) = pair(seed, 1.0);
        let w = x.compensated();
        for i in 0..=STEPS {
            let t = g.time(i);
            let mut oracle = 0.0;
            for j in 0..i {
                oracle += k.value(i, j) * (w.values()[j + 1] - w.values()[j]);
            }
            let primal = eval_h(&k, &w, t).unwrap();
            prop_assert!(close(primal, oracle, 1e-12));
            prop_assert!((primal - eval_h_dual(&riesz, &w, t).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn exponent_pair_round_trips(c in prop_oneof![-3.0..-1e-3_f64, 1e-3..3.0_f64]) {
        let r = recover_params((c * c - c) / 2.0, 2.0 * c * c - c, 1e-9).unwrap();
        let selected = r.selected.expect("b = -c/2 selects one sign");
        prop_assert!((selected - c).abs() <= 1e-9 * (1.0 + c.abs()));
        prop_assert!((r.b + selected / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn substitution_matrix_matches_pointwise_oracle(
        coeffs in prop::collection::vec(-20i64..20, 27),
        t in -1.0..1.0_f64,
        x in -1.0..1.0_f64,
    ) {
        let d = 6;
        let terms: Vec<_> = monomials(d)
            .into_iter()
            .zip(&coeffs)
            .map(|(m, &c)| (m, BigRational::from_integer(c.into())))
            .collect();
        let p = BivariatePoly::from_terms(d, &terms).unwrap();
        let lp = build_substitution_matrix(d).unwrap().apply(&p);
        let oracle = p.eval(t, x) - 0.5 * p.eval(4.0 * t, 2.0 * x + t);
        prop_assert!((lp.eval(t, x) - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()));
        prop_assert_eq!(lp, p.apply_substitution());
    }
}

/// Strictly causal kernel filled row by row from `flat`.
fn dense_kernel(g: TimeGrid, flat: &[f64]) -> KernelSpec {
    let mut it = flat.iter().copied();
    let dense: Vec<Vec<f64>> = (0..=STEPS)
        .map(|i| (0..STEPS).map(|k| if k < i { it.next().unwrap() } else { 0.0 }).collect())
        .collect();
    KernelSpec::from_dense(g, &dense).unwrap()
}

#[test]
fn brownian_driver_is_reproducible() {
    let a = sample_brownian(&grid(), Seed::new(9, 3));
    let b = sample_brownian(&grid(), Seed::new(9, 3));
    let c = sample_brownian(&grid(), Seed::new(9, 4));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.values()[0], 0.0);
}
