//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, problem assembly, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid domain, grid, potential or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A state vector violated the unit-norm constraint beyond tolerance.
    #[error("state norm error |\u{2016}X\u{2016}\u{00b2} - 1| = {norm_error:e} exceeds {tolerance:e}")]
    Normalization { norm_error: f64, tolerance: f64 },

    /// The curvilinear line search could not find an acceptable step.
    #[error(
        "line search failed after {backtracks} backtracks (residual norm {residual:e}); \
         gradient may be inconsistent or the tolerance is exhausted"
    )]
    StepFailure { backtracks: usize, residual: f64 },

    /// The objective evaluated to a non-finite value.
    #[error("non-finite energy at iteration {iteration}: F = {energy}, max|X_j| = {max_abs:e}")]
    NumericalOverflow {
        iteration: usize,
        energy: f64,
        max_abs: f64,
    },

    /// Two grids expected to be related by uniform refinement are not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Malformed grid-data file.
    #[error("grid-data format error: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
