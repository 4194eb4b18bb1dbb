use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Coupling parameters violate a stability or normalizability condition.
    #[error("unstable parameters: {0}")]
    Instability(String),

    /// An argument lies outside the domain of the operation (negative temperature, bad step, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    /// A covariance matrix violates the uncertainty principle.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// A linear system or matrix inverse that should exist is singular.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("integrator failure at t = {time}: {reason} (try dt <= {suggested_dt:e})")]
    Integrator {
        time: f64,
        reason: String,
        suggested_dt: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
