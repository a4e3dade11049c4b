use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    /// `suite/check`.
    pub id: &'static str,
    pub anchor: &'static str,
}

const fn entry(id: &'static str, anchor: &'static str) -> CatalogEntry {
    CatalogEntry { id, anchor }
}

/// Every check a suite can emit. Entries ending in `-violated` are emitted
/// only when the surface is expected to violate the base check.
pub const CATALOG: &[CatalogEntry] = &[
    entry("theorem1/yor-identity", "product rule E(X) E(Y) = E(X + Y + <X,Y>)"),
    entry("theorem1/lob", "f(<X>,X) f(<Y>,Y) = f(<X+Y>, X + Y + <X,Y>) on random semimartingales"),
    entry("theorem1/lob-violated", "surface violates the semimartingale functional equation"),
    entry("theorem1/increment", "increment factorization f(s,W_s) f(t-s, W_t - W_s) = f(t,W_t)"),
    entry("theorem1/increment-violated", "surface violates the increment factorization"),
    entry("theorem1/cauchy2d", "two-variable Cauchy equation f(s,x) f(t-s,y) = f(t, x+y)"),
    entry("theorem1/cauchy2d-violated", "surface violates the two-variable Cauchy equation"),
    entry("theorem1/single-bm", "single Brownian equation f(t,W_t)^2 = f(4t, 2W_t + t)"),
    entry("theorem1/single-bm-violated", "surface violates the single Brownian equation"),
    entry("theorem1/ae-fraction", "Gaussian-weighted share of Cauchy violations is zero"),
    entry("theorem1/ae-fraction-violated", "Cauchy violations carry positive Gaussian weight"),
    entry("theorem1/witness-single-bm", "exp|(2x - t) t|^(1/3) solves the single Brownian equation"),
    entry("theorem1/witness-cauchy", "exp|(2x - t) t|^(1/3) violates the Cauchy equation at (1, 2, 1, 0)"),
    entry("martingale/lambda1", "lambda1 = (c^2 - c)/2 from the growth of E f(t,W_t)"),
    entry("martingale/lambda2", "lambda2 = 2c^2 - c from the growth of E f^2(t,W_t)"),
    entry("martingale/holder", "holder inequality lambda1 <= lambda2 / 2"),
    entry("martingale/martingale-n1", "f(t,W_t) exp(-lambda1 t) is a martingale"),
    entry("martingale/martingale-n2", "f^2(t,W_t) exp(-lambda2 t) is a martingale"),
    entry("martingale/martingale-form21", "f(4t, 2W_t + t) exp(-lambda2 t) is a martingale"),
    entry("martingale/normality", "ln f(t,W_t) is Gaussian and the Bernstein pair is uncorrelated"),
    entry("martingale/normality-violated", "log-normality rejected for a non-solution"),
    entry("martingale/log-moments", "E f(t,W_t)^p finite for p in {-2, -1, 1, 2, 4}"),
    entry("pde/heat-convergence", "backward heat equation Y_t + Y_xx/2 = 0 with second-order residual decay"),
    entry("pde/heat-wrong-lambda", "backward heat equation fails for a wrong exponent"),
    entry("pde/eq1-analytic", "f_t + f_xx/2 - lambda1 f = 0 for canonical surfaces"),
    entry("pde/eq2-analytic", "2 f f_t - lambda2 f^2 + f_x^2 + f f_xx = 0 for canonical surfaces"),
    entry("pde/eq3-analytic", "f_x^2 = (lambda2 - 2 lambda1) f^2 for canonical surfaces"),
    entry("pde/substitution-identity", "second equation = 2f (first equation) + gradient equation"),
    entry("pde/recover-params", "c^2 = lambda2 - 2 lambda1 and b = -c/2 recover the surface"),
    entry("pde/surface-eq1", "configured surface: f_t + f_xx/2 - lambda1 f = 0"),
    entry("pde/surface-eq2", "configured surface: 2 f f_t - lambda2 f^2 + f_x^2 + f f_xx = 0"),
    entry("pde/surface-eq3", "configured surface: f_x^2 = (lambda2 - 2 lambda1) f^2"),
    entry("pde/surface-b-minus-half-c", "configured surface has time exponent b = -c/2"),
    entry("pde/surface-b-minus-half-c-violated", "configured surface has time exponent b != -c/2"),
    entry("pde/surface-fd-linear", "configured surface: first equation by finite differences with fitted lambdas"),
    entry("uniqueness/nullspace-dimension", "h(t,x) = h(4t, 2x + t)/2 has a one-dimensional polynomial solution space"),
    entry("uniqueness/nullspace-basis", "polynomial solutions are multiples of x - t/2"),
    entry("uniqueness/cascade", "h_t(0,0) = -h_x(0,0)/2 and every higher Taylor coefficient vanishes"),
    entry("uniqueness/layer-invertibility", "substitution operator is invertible on homogeneous layers of degree >= 2"),
    entry("uniqueness/leading-block", "degree-d matrix is the leading block of the degree-(d+1) matrix"),
    entry("uniqueness/dyadic-denominators", "matrix entries have power-of-two denominators"),
    entry("kernels/embedding", "unit kernel functional equals the stochastic exponential"),
    entry("kernels/fex2", "kernel representation exp int K(t,s) d(X - <X>/2) obeys the product rule"),
    entry("kernels/duality", "integration by parts: sum K(t,s) dw = sum w G(t,ds)"),
    entry("kernels/riesz-round-trip", "Riesz measure: K(t,s) = G(t,t) - G(t,s)"),
    entry("kernels/additivity", "h(t, w + w') = h(t, w) + h(t, w')"),
    entry("kernels/continuity-modulus", "kernel functional is continuous in t for smooth paths"),
    entry("kernels/kolmogorov-triangular", "Kolmogorov condition int |K(t,s) - K(t',s)|^2 ds <= C |t - t'|^2 holds for (t - s)+"),
    entry("kernels/kolmogorov-indicator", "Kolmogorov condition fails for the indicator kernel (exponent 1)"),
    entry("kernels/kolmogorov-zero", "Kolmogorov condition is vacuous for the zero kernel"),
    entry("kernels/rough-fex2", "rough scalar kernel v(t) 1{s<t} obeys the product rule"),
    entry("kernels/rough-variation-growth", "Weierstrass v has divergent dyadic total variation"),
    entry("kernels/rough-verdict", "v(t)(W_t - t/2): semimartingale property not supported (heuristic)"),
    entry("kernels/configured-fex2", "configured kernel obeys the product rule"),
    entry("kernels/configured-duality", "configured kernel: primal and dual evaluations agree"),
    entry("kernels/configured-kolmogorov", "configured kernel: fitted Kolmogorov exponent"),
];

pub fn list_checks() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn anchor(id: &str) -> Option<&'static str> {
    CATALOG.iter().find(|e| e.id == id).map(|e| e.anchor)
}
