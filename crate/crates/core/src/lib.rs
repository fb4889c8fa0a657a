//! Computational toolkit for weighted inhomogeneous Diophantine approximation
//! on planar curves.
//!
//! The crate is organised the way an experiment flows:
//!
//! - [`funcs`]: approximating functions ψ and dimension functions h, with the
//!   monotonicity, admissibility and regularity checks the theory imposes.
//! - [`series`]: convergence/divergence verdicts for the series criteria and
//!   the critical exponent s₀.
//! - [`curves`]: the curve catalog with exact derivatives and the
//!   non-degenerate decomposition.
//! - [`resonant`]: enumeration and counting of θ-shifted rational points near
//!   a curve, with an independent brute-force oracle.
//! - [`ubiquity`]: ubiquity wiring (Φ, Ψ, ρ, u) and empirical local-ubiquity
//!   coverage.
//! - [`limsup`]: dyadic covers, Hausdorff h-measure upper estimates, slope
//!   dimension estimates and Monte Carlo membership.

// Negated comparisons are how NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::should_implement_trait)]

pub mod curves;
mod error;
pub mod funcs;
pub mod interval;
pub mod limsup;
mod parallel;
pub mod resonant;
pub mod series;
pub mod ubiquity;

pub use error::{Error, Result};
pub use interval::Interval;
pub use parallel::Threads;

/// Tolerance used for construction-time tie comparisons.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
