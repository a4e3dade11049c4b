//! Numerical laboratory for functional equations satisfied by the
//! stochastic exponential `E_t(X) = exp(X_t - <X>_t / 2)`.

pub mod error;
pub mod kernel;
pub mod martingale;
pub mod path;
pub mod pde;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod stoch_exp;
pub mod surface;
pub mod uniqueness;

pub use error::{Error, Result};
