//! One mode (a) in contact with a Markovian thermal bath while coupled to mode b.
//!
//! The closed part is the exact normal-mode rotation; how dissipation enters is a
//! modelling choice, so it sits behind [`DynamicsModel`] (see [`models`]).

pub mod lyapunov;
pub mod models;

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::Serialize;

use crate::coupled::{ground_state_covariance, normal_mode_frequencies, normal_mode_transform, ModelParams};
use crate::error::{Error, Result};
use crate::gaussian::{coherence, gaussian_fidelity, SingleModeState, TwoModeState};
use crate::registry::Named;
use crate::thermal::Temperature;

pub use lyapunov::{asymptotic_state_full, drift, diffusion, MomentIntegrator};
pub use models::{dynamics_models, FullLocalDissipator, ReduceThenDissipate};

pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathParams {
    pub gamma: f64,
    pub temperature: Temperature,
}

impl BathParams {
    pub fn new(gamma: f64, temperature: Temperature) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { gamma, temperature })
    }

    /// Occupation of the bath at the bare mode frequency.
    pub fn n_bar(&self, omega: f64) -> f64 {
        self.temperature.occupation(omega)
    }

    /// Single-mode Gibbs state of the bath at the bare mode frequency.
    pub fn thermal_state(&self, omega: f64) -> SingleModeState {
        SingleModeState::thermal(self.n_bar(omega))
    }
}

impl Default for BathParams {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            temperature: Temperature::new(DEFAULT_TEMPERATURE).expect("positive"),
        }
    }
}

/// Coordinates in which `d0` is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DisplacementFrame {
    /// `(Q₊, P₊, Q₋, P₋)`, the normal-mode quadratures of [`normal_mode_transform`].
    #[default]
    NormalMode,
    /// `(X_a, P_a, X_b, P_b)`.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InitialCovariance {
    /// Identity: vacuum of the uncoupled modes.
    #[default]
    Vacuum,
    /// Ground state of the coupled Hamiltonian.
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialCondition {
    pub d0: Vector4<f64>,
    pub frame: DisplacementFrame,
    pub covariance: InitialCovariance,
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self {
            d0: Vector4::new(1.0, 1.0, 1.0, 1.0),
            frame: DisplacementFrame::default(),
            covariance: InitialCovariance::default(),
        }
    }
}

impl InitialCondition {
    pub fn new(d0: Vector4<f64>) -> Result<Self> {
        if d0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("initial displacement must be finite".into()));
        }
        Ok(Self {
            d0,
            ..Self::default()
        })
    }

    pub fn with_frame(mut self, frame: DisplacementFrame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_covariance(mut self, covariance: InitialCovariance) -> Self {
        self.covariance = covariance;
        self
    }

    /// The two-mode state at `t = 0` in `(X_a, P_a, X_b, P_b)`.
    pub fn state(&self, p: &ModelParams) -> Result<TwoModeState> {
        let sigma = match self.covariance {
            InitialCovariance::Vacuum => Matrix4::identity(),
            InitialCovariance::Ground => ground_state_covariance(p)?.sigma,
        };
        let d = match self.frame {
            DisplacementFrame::Quadrature => self.d0,
            DisplacementFrame::NormalMode => normal_mode_transform(p)
                .try_inverse()
                .ok_or_else(|| Error::Degenerate("normal-mode transform is singular".into()))?
                * self.d0,
        };
        TwoModeState::new(d, sigma)
    }
}

/// Symplectic propagator of the closed two-mode dynamics over time `t`.
pub fn closed_propagator(p: &ModelParams, t: f64) -> Result<Matrix4<f64>> {
    let to_nm = normal_mode_transform(p);
    let from_nm = to_nm
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("normal-mode transform is singular".into()))?;
    let (lp, lm) = normal_mode_frequencies(p);
    let rot = |w: f64| {
        let (s, c) = (w * t).sin_cos();
        Matrix2::new(c, s, -s, c)
    };
    let mut r = Matrix4::zeros();
    r.fixed_view_mut::<2, 2>(0, 0).copy_from(&rot(lp));
    r.fixed_view_mut::<2, 2>(2, 2).copy_from(&rot(lm));
    Ok(from_nm * r * to_nm)
}

/// Closed-system state at time `t`: each normal mode rotates at `Λ±`.
pub fn closed_evolution(p: &ModelParams, init: &InitialCondition, t: f64) -> Result<TwoModeState> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let s0 = init.state(p)?;
    if t == 0.0 {
        return Ok(s0);
    }
    let s = closed_propagator(p, t)?;
    Ok(TwoModeState {
        d: s * s0.d,
        sigma: s * s0.sigma * s.transpose(),
    })
}

/// Sampling grid and step for a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
    /// Record every `stride`-th step.
    pub stride: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64, stride: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if !(t_max >= dt) || !t_max.is_finite() {
            return Err(Error::Domain(format!("t_max = {t_max} must be >= dt = {dt}")));
        }
        if stride == 0 {
            return Err(Error::Domain("stride must be >= 1".into()));
        }
        Ok(Self { t_max, dt, stride })
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// Sample times `0, stride·dt, …`, always ending at the last step.
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_steps();
        let mut out: Vec<f64> = (0..=n)
            .step_by(self.stride)
            .map(|k| k as f64 * self.dt)
            .collect();
        if n % self.stride != 0 {
            out.push(n as f64 * self.dt);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Reduced state of mode a.
    pub states: Vec<SingleModeState>,
    pub coherence: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// State the fidelity is measured against.
    pub reference: SingleModeState,
    /// Full two-mode moments, when the model defines them.
    #[serde(skip)]
    pub global: Option<Vec<TwoModeState>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Raw evolution, before observables.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSeries {
    pub times: Vec<f64>,
    pub states: Vec<SingleModeState>,
    pub global: Option<Vec<TwoModeState>>,
}

/// A way of adding the bath on mode a to the closed two-mode dynamics.
pub trait DynamicsModel: Named + Send + Sync {
    fn evolve(
        &self,
        p: &ModelParams,
        bath: &BathParams,
        init: &InitialCondition,
        grid: &TimeGrid,
    ) -> Result<StateSeries>;

    /// Long-time state of mode a (`Γ > 0`).
    fn asymptote(&self, p: &ModelParams, bath: &BathParams) -> Result<SingleModeState>;
}

/// Fidelity reference: the model's asymptote, or the bath Gibbs state when `Γ = 0`.
pub fn fidelity_reference(
    model: &dyn DynamicsModel,
    p: &ModelParams,
    bath: &BathParams,
) -> Result<SingleModeState> {
    if bath.gamma == 0.0 {
        Ok(bath.thermal_state(p.omega))
    } else {
        model.asymptote(p, bath)
    }
}

/// Per-sample coherence and fidelity against `reference`.
pub fn trajectory_observables(
    states: &[SingleModeState],
    reference: &SingleModeState,
) -> Result<(Vec<f64>, Vec<f64>)> {
    states
        .iter()
        .map(|s| Ok((coherence(s)?, gaussian_fidelity(s, reference)?)))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().unzip())
}

pub fn dissipative_evolution(
    model: &dyn DynamicsModel,
    p: &ModelParams,
    bath: &BathParams,
    init: &InitialCondition,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let reference = fidelity_reference(model, p, bath)?;
    let series = model.evolve(p, bath, init, grid)?;
    let (coherence, fidelity) = trajectory_observables(&series.states, &reference)?;
    Ok(Trajectory {
        times: series.times,
        states: series.states,
        coherence,
        fidelity,
        reference,
        global: series.global,
    })
}

/// Indices of local extrema of a sampled series; reversals smaller than `tol` are
/// treated as noise.
pub fn local_extrema(values: &[f64], tol: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let Some(&first) = values.first() else {
        return out;
    };
    let mut dir = 0i8;
    let mut cand = 0usize;
    for (i, &v) in values.iter().enumerate().skip(1) {
        match dir {
            0 if v - first > tol => (dir, cand) = (1, i),
            0 if first - v > tol => (dir, cand) = (-1, i),
            1 if v >= values[cand] => cand = i,
            1 if values[cand] - v > tol => {
                out.push(cand);
                (dir, cand) = (-1, i);
            }
            -1 if v <= values[cand] => cand = i,
            -1 if v - values[cand] > tol => {
                out.push(cand);
                (dir, cand) = (1, i);
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{symplectic_form, GaussianState};
    use nalgebra::DMatrix;

    fn params(l: f64, m: f64) -> ModelParams {
        ModelParams::new(1.0, l, m).unwrap()
    }

    #[test]
    fn propagator_is_symplectic() {
        let omega = symplectic_form(2);
        for &(l, m) in &[(0.3, 0.2), (0.0, 0.5), (0.45, 0.5)] {
            let s = closed_propagator(&params(l, m), 2.7).unwrap();
            let sd = DMatrix::from_iterator(4, 4, s.iter().copied());
            assert!((&sd * &omega * sd.transpose() - &omega).abs().max() < 1e-12);
        }
    }

    #[test]
    fn propagator_generated_by_hamiltonian() {
        let p = params(0.3, 0.2);
        let h = 1e-5;
        let s = closed_propagator(&p, h).unwrap();
        let deriv = (s - closed_propagator(&p, 0.0).unwrap()) / h;
        let a = drift(&p, &BathParams::new(0.0, Temperature::ZERO).unwrap());
        assert!((deriv - a).abs().max() < 1e-4);
    }

    #[test]
    fn closed_evolution_basics() {
        let init = InitialCondition::default();
        let p = params(0.3, 0.2);
        let s0 = closed_evolution(&p, &init, 0.0).unwrap();
        assert_eq!(s0, init.state(&p).unwrap());
        let s = closed_evolution(&p, &init, 13.0).unwrap();
        for nu in s.spectrum().unwrap().values() {
            assert!((nu - 1.0).abs() < 1e-9);
        }
        let q = params(0.0, 0.0);
        let full = closed_evolution(&q, &init, 2.0 * std::f64::consts::PI).unwrap();
        let start = init.state(&q).unwrap();
        assert!((full.d - start.d).abs().max() < 1e-12);
        assert!((full.sigma - start.sigma).abs().max() < 1e-12);
    }

    #[test]
    fn normal_mode_frame_places_displacement() {
        let p = params(0.2, 0.0);
        let s = InitialCondition::default().state(&p).unwrap();
        let back = normal_mode_transform(&p) * s.d;
        assert!((back - Vector4::new(1.0, 1.0, 1.0, 1.0)).abs().max() < 1e-14);
        let q = InitialCondition::default()
            .with_frame(DisplacementFrame::Quadrature)
            .state(&p)
            .unwrap();
        assert_eq!(q.d, Vector4::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn time_grid_samples() {
        let g = TimeGrid::new(1.0, 0.1, 3).unwrap();
        let t = g.times();
        assert_eq!(t.len(), 5);
        assert!((t[4] - 1.0).abs() < 1e-12);
        assert!(TimeGrid::new(0.01, 0.1, 1).is_err());
        assert!(TimeGrid::new(1.0, 0.1, 0).is_err());
    }

    #[test]
    fn extrema_counting() {
        let xs: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin()).collect();
        assert_eq!(local_extrema(&xs, 1e-9).len(), 6);
        let mono: Vec<f64> = (0..50).map(|i| 1.0 - (-(i as f64) * 0.1).exp()).collect();
        assert!(local_extrema(&mono, 1e-12).is_empty());
    }
}
