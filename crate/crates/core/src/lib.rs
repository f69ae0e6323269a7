//! Core library for simulating stationary random fields built from
//! Lévy-noise integrals and for testing central-limit behaviour of
//! normalized window functionals against their predicted Gaussian limits.
//!
//! The crate is organized around five concerns:
//!
//! * [`meixner`] — orthogonal polynomial systems attached to infinitely
//!   divisible marginal laws (Hermite, Laguerre, Charlier, Meixner,
//!   Meixner–Pollaczek), with exact-rational reference computations,
//!   a quadrature-based expectation engine, and marginal samplers.
//! * [`fields`] — generators for stationary fields on a lattice window:
//!   Lévy white-noise box integrals, Gaussian moving averages, and the
//!   planar Poisson–Voronoi volume-fraction field.
//! * [`functionals`] — test functions applied site-wise to a field,
//!   normalized window integrals, and Lipschitz covering nets.
//! * [`covariance`] — estimation of the limiting covariance bilinear form
//!   by two independent routes, and Gram–Schmidt orthogonalization in the
//!   induced geometry.
//! * [`harness`] — Monte Carlo experiment drivers: replicated field
//!   simulation, Kolmogorov–Smirnov normality checks, and variance-decay
//!   scans for degenerate directions.
//!
//! Parallelism is provided by `rayon` behind the `parallel` feature
//! (enabled by default); disabling it yields a fully sequential build that
//! produces bit-identical numerical results.

pub mod config;
pub mod covariance;
pub mod error;
pub mod exec;
pub mod fields;
pub mod functionals;
pub mod harness;
pub mod meixner;

pub use error::{CoreError, Result};
