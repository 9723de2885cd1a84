//! Stein's method for the half-normal distribution, made executable.
//!
//! The crate computes the exact laws of three simple-random-walk statistics
//! (returns to the origin, running maximum, sign changes), the solutions of
//! the half-normal Stein equation together with the constants that bound
//! them, discrete Stein characterizations of the exact laws, and exact
//! Kolmogorov and Wasserstein distances to the half-normal limit.

pub mod discrete_stein;
pub mod distances;
pub mod distributions;
pub mod error;
pub mod mc_oracle;
pub mod quadrature;
pub mod search;
pub mod srw_laws;
pub mod statistic;
pub mod stein_core;

pub use error::{Error, Result};
pub use statistic::Statistic;
