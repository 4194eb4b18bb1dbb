//! Gaussian-state coherence of two bilinearly coupled bosonic modes: closed system,
//! symmetric thermal baths, and a single local bath.

pub mod coupled;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod quadrature;
pub mod registry;
pub mod thermal;

pub use coupled::{diagonalize, validate_params, DiagonalizationResult, ModelParams};
pub use error::{Error, Result};
pub use gaussian::{GaussianState, SingleModeState, SymplecticSpectrum, TwoModeState};
pub use thermal::{steady_coherence, steady_state_covariance, Temperature};
pub use dynamics::{BathParams, DynamicsModel, InitialCondition, TimeGrid, Trajectory};
