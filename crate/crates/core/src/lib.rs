//! Brier score toolkit for binary prediction models.
//!
//! The crate is split along the lines of what a user wants to know:
//!
//! - [`scoring`]: observed metrics on a prediction/outcome pair (Brier score,
//!   RMSE, MAE, calibration-in-the-large) plus reference scores and
//!   interpretation diagnostics.
//! - [`analytic`]: closed-form expectations, differences, variances and
//!   bounds of the Brier score when outcomes are independent Bernoulli draws.
//! - [`oracle`]: exact enumeration over all `2^n` outcome vectors, used as
//!   ground truth for the closed forms and the Monte Carlo estimates.
//! - [`dgm`]: data-generating mechanisms for true risks, predictor transforms
//!   and outcomes.
//! - [`engine`]: the simulation study itself, with per-replication random
//!   streams so results are identical at any worker count.
//!
//! Parallel execution is provided by rayon behind the `parallel` feature
//! (enabled by default). Without it every routine runs sequentially and
//! produces the same numbers.

pub mod analytic;
pub mod dgm;
pub mod engine;
mod error;
pub mod exec;
pub mod oracle;
pub mod rng;
pub mod scoring;

pub use error::{Error, Result};

/// Slack allowed when checking that a value lies in `[0, 1]`.
pub const PROB_TOLERANCE: f64 = 1e-12;
