use thiserror::Error;

/// Errors raised by the spectral, diffeomorphism and flow layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid size or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Coefficient data that cannot describe a real function on the grid.
    #[error("representation error: {0}")]
    Representation(String),

    /// Input outside the domain of an operator (e.g. nonzero mean for an inverse).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two operands live on different grids.
    #[error("grid mismatch: {left} vs {right} points")]
    GridMismatch { left: usize, right: usize },

    /// Displacement violates the basepoint condition f(0) = 0.
    #[error("chart error: {0}")]
    Chart(String),

    /// Map is not orientation preserving (1 + f' too small somewhere).
    #[error("orientation error: min(1 + f') = {min_jacobian:e} at x = {at:.6}")]
    Orientation { min_jacobian: f64, at: f64 },

    /// An iterative solve did not converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A structural identity (e.g. zero mean of a bracket) failed beyond tolerance.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// A time step left the admissible state space.
    #[error("step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
