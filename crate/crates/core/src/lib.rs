//! Exact series solutions of time-delay advection equations.
//!
//! The equation `du/dt (x, t) = -a du/dx (x, t - tau)` (and its Caputo
//! time-fractional generalization of order `alpha`) admits exact
//! truncated-series solutions built on the delay exponential function and
//! the delay fractional Mittag-Leffler function. This crate evaluates
//! those solutions for a catalogue of initial conditions, extends them to
//! separable initial data `f(x) g(t)`, and verifies them independently
//! with finite-difference and L1-Caputo residual checks plus a
//! method-of-lines oracle.
//!
//! Key structure:
//! - the solution vanishes for `t < 0` and equals its initial data on the
//!   plateau `0 <= t <= tau`;
//! - each additional delay interval adds one series term, so values are
//!   finite sums with breakpoints at `t = n tau`;
//! - for `f(x) = exp(x)` and `a tau e > 1` the solution oscillates.

pub mod delay;
pub mod error;
pub mod grid;
pub mod initial;
mod quad;
pub mod solution;
pub mod special;
pub mod verify;

pub use delay::{delay_ml, dexp, dexp_derivative, dexp_scaled, DelayArg, TERM_CAP};
pub use error::{Error, Result};
pub use grid::{eval_grid, linspace, GridSpec, SolutionField};
pub use initial::{InitialCondition, TimeProfile};
pub use solution::{
    eval_cosh_closed, eval_fractional, eval_gaussian_hermite, eval_integer, eval_separable,
    eval_spectral, DelayParams, SpectralPair, SPECTRAL_DEFAULT_K_MAX, SPECTRAL_DEFAULT_NK,
};
pub use special::{gamma, heaviside, hermite, hermite_table, HermiteTable};
pub use verify::{
    compare, oracle_solve, residual_fractional, residual_integer, CompareReport, OracleConfig,
    ResidualReport,
};
