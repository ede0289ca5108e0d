//! Error types shared across the crate.

/// Errors produced by constructors, solvers, and the simulation layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A model primitive or configuration value is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation that requires a fixed point received a slope that is not one.
    #[error("beta = {beta} is not a fixed point: |best_response(beta) - beta| = {residual:.3e} exceeds {tol:.1e}")]
    NotAFixedPoint { beta: f64, residual: f64, tol: f64 },

    /// Attenuation cannot reach the requested target slope.
    #[error("target slope {target} unreachable from training slope {train_beta}: attenuation covers (0, {best_response}]")]
    TargetUnreachable {
        target: f64,
        train_beta: f64,
        best_response: f64,
    },

    /// The regressor column has zero sample variance.
    #[error("degenerate regressor: sample variance of x is zero")]
    DegenerateRegressor,

    /// A sample needs at least two rows.
    #[error("sample too small: n = {0}, need n >= 2")]
    SampleTooSmall(usize),

    /// An internal invariant of a solver failed. This indicates a bug, not bad input.
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
