use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: horizon {horizon}, steps {n_steps}")]
    InvalidGrid { horizon: f64, n_steps: usize },

    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("paths live on different time grids")]
    GridMismatch,

    #[error("semimartingales are driven by different Brownian paths")]
    DriverMismatch,

    #[error("time {time} is not a grid point (step {step})")]
    Misaligned { time: f64, step: f64 },

    #[error("invalid interval: s = {s} > t = {t}")]
    InvalidInterval { s: f64, t: f64 },

    #[error("surface `{label}` is not strictly positive at (u, v) = ({u}, {v}): value {value}")]
    NonPositive {
        label: String,
        u: f64,
        v: f64,
        value: f64,
    },

    #[error("non-finite sample at t = {t}, path {path}")]
    NonFinite { t: f64, path: u64 },

    #[error("non-finite finite difference at (t, x) = ({t}, {x})")]
    NonFiniteDerivative { t: f64, x: f64 },

    #[error("surface `{0}` has no closed-form partial derivatives")]
    NoPartials(String),

    #[error("Euler recursion lost positivity at grid index {index}")]
    PositivityLost { index: usize },

    #[error("degree {0} outside the supported range 1..=12")]
    DegreeOutOfRange(usize),

    #[error("negative discriminant: lambda2 - 2 lambda1 = {0}")]
    NegativeDiscriminant(f64),

    #[error("kernel is not causal: K({t}, {s}) = {value} but must vanish for s >= t")]
    KernelNotCausal { t: f64, s: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse {what} `{input}`: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
