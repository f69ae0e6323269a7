//! Error types shared across the library.

use thiserror::Error;

/// Unified error type for all core operations.
///
/// Variants mirror the failure classes of the public operations: invalid
/// distribution parameters, lattice-alignment violations, degenerate
/// geometry, rejection-sampler exhaustion, out-of-window lags, insufficient
/// replicate counts, Gram–Schmidt degeneracy, inconsistent experiment
/// configuration, and domain violations of function-space preconditions.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A distribution or system parameter lies outside its domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A length that must be an exact multiple of the lattice spacing is not.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Degenerate or invalid geometric input (e.g. a polygon with fewer than
    /// three distinct vertices or non-positive area).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A rejection sampler exceeded its attempt budget, which signals a bad
    /// envelope rather than bad luck.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// A requested covariance lag falls outside the simulation window.
    #[error("lag error: {0}")]
    Lag(String),

    /// Too few replicates for the requested estimator.
    #[error("sample-size error: {0}")]
    SampleSize(String),

    /// Gram–Schmidt hit a numerically degenerate direction: the named basis
    /// member has squared norm at or below the degeneracy threshold.
    #[error(
        "degeneracy error: basis member {index} has squared norm {norm:.6e} \
         at or below threshold {threshold:.6e}"
    )]
    Degeneracy {
        index: usize,
        norm: f64,
        threshold: f64,
    },

    /// Invalid or internally inconsistent experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside an operation's stated domain (e.g. a covering-net query
    /// for a function with f(0) ≠ 0).
    #[error("domain error: {0}")]
    Domain(String),
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
