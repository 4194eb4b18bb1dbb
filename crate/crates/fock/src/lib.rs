//! Brute-force reference for the Gaussian results: the two-mode model in a truncated
//! number basis `|n_a, n_b⟩`, `0 ≤ n ≤ cutoff`.

pub mod basis;
pub mod density;
pub mod hamiltonian;
pub mod lindblad;
pub mod single;
pub mod states;

pub use basis::{Basis, FockConfig, Parity};
pub use faer::c64;
pub use density::DensityOperator;
pub use hamiltonian::build_hamiltonian;
pub use lindblad::{coherent_state, LindbladStepper};
pub use states::{ground_state_fock, steady_state_fock, OracleState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FockError {
    #[error(transparent)]
    Model(#[from] bimode_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("truncation leakage {leakage:.3e} exceeds {tol:.1e}; raise the cutoff")]
    Truncation { leakage: f64, tol: f64 },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("step failure at t = {time}: {reason} (try dt <= {suggested_dt:e})")]
    Step {
        time: f64,
        reason: String,
        suggested_dt: f64,
    },
}

pub type Result<T> = std::result::Result<T, FockError>;
