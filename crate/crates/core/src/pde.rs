//! Finite-difference residuals of the PDEs a continuous solution must
//! satisfy: the backward heat equation `Y_t + Y_xx / 2 = 0` for
//! `Y = f^p e^{-lambda t}`, and the system
//!
//! ```text
//! f_t + f_xx / 2 - lambda_1 f = 0
//! 2 f f_t - lambda_2 f^2 + f_x^2 + f f_xx = 0
//! f_x^2 - (lambda_2 - 2 lambda_1) f^2 = 0
//! ```
//!
//! All derivatives are second-order central differences evaluated on the
//! interior nodes of a rectangle inside `(0, T) x R`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{CandidateSurface, Partials};

/// Half-width of the excluded tube around a non-smooth set, in units of
/// the space step.
pub const SINGULAR_TUBE: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_t: usize,
    pub n_x: usize,
}

impl RectGrid {
    pub fn new(t_min: f64, t_max: f64, x_min: f64, x_max: f64, n_t: usize, n_x: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && x_max > x_min) || n_t < 2 || n_x < 2 {
            return Err(Error::InvalidArgument(format!(
                "bad rectangle [{t_min}, {t_max}] x [{x_min}, {x_max}] with {n_t} x {n_x} cells"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            x_min,
            x_max,
            n_t,
            n_x,
        })
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.n_t as f64
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_x as f64
    }

    /// Same rectangle with both spacings halved.
    pub fn halved(&self) -> Self {
        Self {
            n_t: 2 * self.n_t,
            n_x: 2 * self.n_x,
            ..*self
        }
    }

    /// Interior nodes `(t, x)`, row-major in `t`.
    pub fn interior(&self) -> Vec<(f64, f64)> {
        let (dt, dx) = (self.dt(), self.dx());
        (1..self.n_t)
            .flat_map(|i| {
                (1..self.n_x).map(move |j| (self.t_min + i as f64 * dt, self.x_min + j as f64 * dx))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualField {
    /// `(t, x, residual)` per evaluated node.
    pub nodes: Vec<(f64, f64, f64)>,
    pub max_norm: f64,
    /// Nodes skipped because they are too close to a non-smooth set.
    pub excluded: usize,
}

impl ResidualField {
    fn from_nodes(nodes: Vec<(f64, f64, f64)>, excluded: usize) -> Self {
        let max_norm = nodes.iter().map(|n| n.2.abs()).fold(0.0, f64::max);
        Self {
            nodes,
            max_norm,
            excluded,
        }
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,x,residual")?;
        for (t, x, r) in &self.nodes {
            writeln!(out, "{t},{x},{r}")?;
        }
        Ok(())
    }
}

/// Central-difference partials of `g` at `(t, x)`.
fn central_partials(g: impl Fn(f64, f64) -> f64, t: f64, x: f64, dt: f64, dx: f64) -> Result<Partials> {
    let value = g(t, x);
    let (xp, xm) = (g(t, x + dx), g(t, x - dx));
    let p = Partials {
        value,
        d_t: (g(t + dt, x) - g(t - dt, x)) / (2.0 * dt),
        d_x: (xp - xm) / (2.0 * dx),
        d_xx: (xp - 2.0 * value + xm) / (dx * dx),
    };
    if [p.value, p.d_t, p.d_x, p.d_xx].iter().all(|v| v.is_finite()) {
        Ok(p)
    } else {
        Err(Error::NonFiniteDerivative { t, x })
    }
}

fn field(
    f: &dyn CandidateSurface,
    grid: &RectGrid,
    residual: impl Fn(f64, f64) -> Result<f64> + Sync,
) -> Result<ResidualField> {
    let tube = SINGULAR_TUBE * grid.dx();
    let all = grid.interior();
    let kept: Vec<(f64, f64)> = all
        .iter()
        .copied()
        .filter(|&(t, x)| !f.near_singularity(t, x, tube))
        .collect();
    let excluded = all.len() - kept.len();
    let nodes = kept
        .par_iter()
        .map(|&(t, x)| residual(t, x).map(|r| (t, x, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualField::from_nodes(nodes, excluded))
}

/// Residual of `Y_t + Y_xx / 2` for `Y = f^power e^{-lambda t}`.
pub fn heat_residual(
    f: &dyn CandidateSurface,
    lambda: f64,
    power: u32,
    grid: &RectGrid,
) -> Result<ResidualField> {
    if !(1..=2).contains(&power) {
        return Err(Error::InvalidArgument(format!("power must be 1 or 2, got {power}")));
    }
    let p = power as f64;
    let y = |t: f64, x: f64| (p * f.ln_eval(t, x) - lambda * t).exp();
    field(f, grid, |t, x| {
        let d = central_partials(y, t, x, grid.dt(), grid.dx())?;
        Ok(d.d_t + 0.5 * d.d_xx)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub max_norms: Vec<f64>,
    /// `max_norms[k] / max_norms[k + 1]`.
    pub ratios: Vec<f64>,
    /// `log2` of the ratios.
    pub orders: Vec<f64>,
}

impl Convergence {
    pub fn from_norms(max_norms: Vec<f64>) -> Self {
        let ratios: Vec<f64> = max_norms.windows(2).map(|w| w[0] / w[1]).collect();
        let orders = ratios.iter().map(|r| r.log2()).collect();
        Self {
            max_norms,
            ratios,
            orders,
        }
    }
}

/// Heat residual max-norms over `refinements` simultaneous halvings of
/// both spacings.
pub fn heat_convergence(
    f: &dyn CandidateSurface,
    lambda: f64,
    power: u32,
    grid: &RectGrid,
    refinements: usize,
) -> Result<Convergence> {
    let mut g = *grid;
    let mut norms = Vec::with_capacity(refinements + 1);
    for _ in 0..=refinements {
        norms.push(heat_residual(f, lambda, power, &g)?.max_norm);
        g = g.halved();
    }
    Ok(Convergence::from_norms(norms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Derivatives {
    FiniteDifference,
    /// Closed-form partials supplied by the surface.
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqSystem {
    /// `f_t + f_xx / 2 - lambda_1 f`.
    pub linear: ResidualField,
    /// `2 f f_t - lambda_2 f^2 + f_x^2 + f f_xx`.
    pub quadratic: ResidualField,
    /// `f_x^2 - (lambda_2 - 2 lambda_1) f^2`.
    pub gradient: ResidualField,
    /// Max over nodes of `|quadratic - (2 f linear + gradient)|`.
    pub substitution_gap: f64,
}

pub fn eq_system_residuals(
    f: &dyn CandidateSurface,
    lambda1: f64,
    lambda2: f64,
    grid: &RectGrid,
    derivatives: Derivatives,
) -> Result<EqSystem> {
    let discriminant = lambda2 - 2.0 * lambda1;
    if discriminant < 0.0 {
        return Err(Error::NegativeDiscriminant(discriminant));
    }
    let partials = |t: f64, x: f64| -> Result<Partials> {
        match derivatives {
            Derivatives::FiniteDifference => {
                central_partials(|t, x| f.eval(t, x), t, x, grid.dt(), grid.dx())
            }
            Derivatives::Analytic => f.partials(t, x).ok_or_else(|| Error::NoPartials(f.label())),
        }
    };
    let rows = field(f, grid, |t, x| {
        let _ = partials(t, x)?;
        Ok(0.0)
    })?;
    let mut linear = Vec::with_capacity(rows.nodes.len());
    let mut quadratic = Vec::with_capacity(rows.nodes.len());
    let mut gradient = Vec::with_capacity(rows.nodes.len());
    let mut gap = 0.0_f64;
    for &(t, x, _) in &rows.nodes {
        let Partials { value: v, d_t, d_x, d_xx } = partials(t, x)?;
        let e1 = d_t + 0.5 * d_xx - lambda1 * v;
        let e2 = 2.0 * v * d_t - lambda2 * v * v + d_x * d_x + v * d_xx;
        let e3 = d_x * d_x - discriminant * v * v;
        gap = gap.max((e2 - (2.0 * v * e1 + e3)).abs());
        linear.push((t, x, e1));
        quadratic.push((t, x, e2));
        gradient.push((t, x, e3));
    }
    Ok(EqSystem {
        linear: ResidualField::from_nodes(linear, rows.excluded),
        quadratic: ResidualField::from_nodes(quadratic, rows.excluded),
        gradient: ResidualField::from_nodes(gradient, rows.excluded),
        substitution_gap: gap,
    })
}

/// Parameters of `exp(c x + b t)` implied by `(lambda_1, lambda_2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveredParams {
    pub c_plus: f64,
    pub c_minus: f64,
    pub b: f64,
    /// The sign of `c` for which `b = -c/2` holds within the tolerance,
    /// when exactly one does. `Some(0.0)` for the degenerate `c = 0`.
    pub selected: Option<f64>,
    /// `|b + c/2|` for the selected (or closer) sign.
    pub mismatch: f64,
}

/// Below this `|c|` both signs coincide and no sign is selected.
pub const ZERO_C: f64 = 1e-8;

pub fn recover_params(lambda1: f64, lambda2: f64, tol: f64) -> Result<RecoveredParams> {
    let discriminant = lambda2 - 2.0 * lambda1;
    if discriminant < 0.0 {
        return Err(Error::NegativeDiscriminant(discriminant));
    }
    let c = discriminant.sqrt();
    let b = (4.0 * lambda1 - lambda2) / 2.0;
    if c < ZERO_C {
        return Ok(RecoveredParams {
            c_plus: 0.0,
            c_minus: 0.0,
            b,
            selected: Some(0.0),
            mismatch: b.abs(),
        });
    }
    let plus = (b + c / 2.0).abs();
    let minus = (b - c / 2.0).abs();
    let selected = match (plus <= tol, minus <= tol) {
        (true, false) => Some(c),
        (false, true) => Some(-c),
        _ => None,
    };
    Ok(RecoveredParams {
        c_plus: c,
        c_minus: -c,
        b,
        selected,
        mismatch: plus.min(minus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{CanonicalSurface, CounterexampleSurface};

    fn rect() -> RectGrid {
        RectGrid::new(0.25, 0.75, -1.0, 1.0, 8, 16).unwrap()
    }

    #[test]
    fn rect_grid_validation() {
        assert!(RectGrid::new(0.0, 0.5, -1.0, 1.0, 4, 4).is_err());
        assert!(RectGrid::new(0.5, 0.25, -1.0, 1.0, 4, 4).is_err());
        assert!(RectGrid::new(0.1, 0.5, -1.0, 1.0, 1, 4).is_err());
        assert_eq!(rect().interior().len(), 7 * 15);
        assert_eq!(rect().halved().dx(), rect().dx() / 2.0);
    }

    #[test]
    fn heat_residual_converges_at_second_order() {
        let conv = heat_convergence(&CanonicalSurface::new(1.0), 0.0, 1, &rect(), 3).unwrap();
        for r in &conv.ratios {
            assert!(*r >= 3.5 && *r < 4.5, "{conv:?}");
        }
    }

    #[test]
    fn heat_residual_with_wrong_lambda_stays_away_from_zero() {
        let conv = heat_convergence(&CanonicalSurface::new(1.0), 0.3, 1, &rect(), 2).unwrap();
        // residual -> -0.3 Y, and Y >= e^{-1 - 3/8} on the rectangle
        assert!(conv.max_norms.iter().all(|&m| m > 0.3 * (-1.375f64).exp()));
    }

    #[test]
    fn heat_residual_for_second_power() {
        // f = e^{x - t/2}: f^2 e^{-t} = e^{2x - 2t}, and Y_t + Y_xx/2 = (-2 + 2) Y
        let conv = heat_convergence(&CanonicalSurface::new(1.0), 1.0, 2, &rect(), 2).unwrap();
        assert!(conv.max_norms[2] < 2e-3, "{conv:?}");
        assert!(conv.ratios.iter().all(|r| *r > 3.0), "{conv:?}");
        assert!(conv.ratios[1] > conv.ratios[0]);
        assert!(heat_residual(&CanonicalSurface::new(1.0), 1.0, 3, &rect()).is_err());
    }

    #[test]
    fn eq_system_canonical() {
        let f = CanonicalSurface::new(1.0);
        let exact = eq_system_residuals(&f, 0.0, 1.0, &rect(), Derivatives::Analytic).unwrap();
        assert!(exact.gradient.max_norm <= 1e-12);
        assert!(exact.linear.max_norm <= 1e-12);
        assert!(exact.quadratic.max_norm <= 1e-12);

        let mut previous = f64::INFINITY;
        let mut g = rect();
        for _ in 0..3 {
            let fd = eq_system_residuals(&f, 0.0, 1.0, &g, Derivatives::FiniteDifference).unwrap();
            assert!(fd.substitution_gap <= 1e-10);
            assert!(fd.linear.max_norm < previous);
            previous = fd.linear.max_norm;
            g = g.halved();
        }
        assert!(previous < 1e-3);
    }

    #[test]
    fn eq_system_constant_surface_is_exact() {
        let f = CanonicalSurface::new(0.0);
        let r = eq_system_residuals(&f, 0.0, 0.0, &rect(), Derivatives::FiniteDifference).unwrap();
        assert_eq!(r.linear.max_norm, 0.0);
        assert_eq!(r.quadratic.max_norm, 0.0);
        assert_eq!(r.gradient.max_norm, 0.0);
    }

    #[test]
    fn eq_system_rejects_negative_discriminant_and_missing_partials() {
        let f = CanonicalSurface::new(1.0);
        assert!(matches!(
            eq_system_residuals(&f, 1.0, 1.0, &rect(), Derivatives::Analytic),
            Err(Error::NegativeDiscriminant(_))
        ));
        assert!(matches!(
            eq_system_residuals(&CounterexampleSurface, 0.0, 1.0, &rect(), Derivatives::Analytic),
            Err(Error::NoPartials(_))
        ));
    }

    #[test]
    fn counterexample_excludes_ridge_and_does_not_converge() {
        let mut g = RectGrid::new(0.25, 0.75, -1.5, 1.5, 16, 48).unwrap();
        let mut norms = vec![];
        for _ in 0..3 {
            let r = eq_system_residuals(&CounterexampleSurface, 0.4, 1.2, &g, Derivatives::FiniteDifference)
                .unwrap();
            assert!(r.linear.excluded > 0);
            assert!(r.linear.nodes.iter().all(|&(t, x, _)| (2.0 * x - t).abs() >= 5.0 * g.dx()));
            norms.push(r.linear.max_norm);
            g = g.halved();
        }
        assert!(norms[2] > 0.1 && norms[2] > 0.5 * norms[0], "{norms:?}");
    }

    #[test]
    fn recover_params_examples() {
        let r = recover_params(0.0, 1.0, 1e-12).unwrap();
        assert_eq!((r.c_plus, r.c_minus, r.b), (1.0, -1.0, -0.5));
        assert_eq!(r.selected, Some(1.0));
        let r = recover_params(1.0, 6.0, 1e-12).unwrap();
        assert_eq!((r.c_plus, r.b), (2.0, -1.0));
        assert_eq!(r.selected, Some(2.0));
        let r = recover_params(0.0, 0.0, 1e-12).unwrap();
        assert_eq!((r.c_plus, r.b, r.selected), (0.0, 0.0, Some(0.0)));
        assert!(matches!(recover_params(1.0, 1.0, 1e-12), Err(Error::NegativeDiscriminant(_))));
    }

    #[test]
    fn recover_params_negative_c() {
        // c = -1: lambda1 = 1, lambda2 = 3
        let r = recover_params(1.0, 3.0, 1e-12).unwrap();
        assert_eq!(r.selected, Some(-1.0));
        assert_eq!(r.b, 0.5);
    }

    #[test]
    fn residual_csv_header() {
        let r = heat_residual(&CanonicalSurface::new(1.0), 0.0, 1, &rect()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x,residual\n"));
        assert_eq!(text.lines().count(), 1 + 7 * 15);
    }
}
