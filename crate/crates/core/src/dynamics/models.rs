use crate::coupled::ModelParams;
use crate::error::Result;
use crate::gaussian::SingleModeState;
use crate::registry::{Named, Registry};

use super::lyapunov::{asymptotic_state_full, MomentIntegrator};
use super::{closed_evolution, BathParams, DynamicsModel, InitialCondition, StateSeries, TimeGrid};

/// Local thermal dissipator on mode a acting during the coupled evolution,
/// integrated as a drift–diffusion flow with RK4.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullLocalDissipator;

/// Closed two-mode evolution, partial trace, then a single-mode thermal channel of
/// rate `Γ` on the reduced state: `σ_a = e^{−Γt}σ + (1 − e^{−Γt})(2n̄ + 1)I`,
/// `d_a = e^{−Γt/2} d`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReduceThenDissipate;

impl Named for FullLocalDissipator {
    fn name(&self) -> &'static str {
        "full"
    }
    fn description(&self) -> &'static str {
        "local dissipator on mode a during the coupled evolution (RK4)"
    }
}

impl DynamicsModel for FullLocalDissipator {
    fn evolve(
        &self,
        p: &ModelParams,
        bath: &BathParams,
        init: &InitialCondition,
        grid: &TimeGrid,
    ) -> Result<StateSeries> {
        let integ = MomentIntegrator::new(p, bath, grid.dt)?;
        let samples = integ.run(&init.state(p)?, grid.n_steps(), grid.stride)?;
        let times = samples.iter().map(|(t, _)| *t).collect();
        let states = samples.iter().map(|(_, s)| s.mode_a()).collect();
        let global = samples.into_iter().map(|(_, s)| s).collect();
        Ok(StateSeries {
            times,
            states,
            global: Some(global),
        })
    }

    fn asymptote(&self, p: &ModelParams, bath: &BathParams) -> Result<SingleModeState> {
        asymptotic_state_full(p, bath)
    }
}

impl Named for ReduceThenDissipate {
    fn name(&self) -> &'static str {
        "reduce-then-dissipate"
    }
    fn description(&self) -> &'static str {
        "unitary two-mode evolution, partial trace, then a thermal channel on mode a"
    }
}

impl DynamicsModel for ReduceThenDissipate {
    fn evolve(
        &self,
        p: &ModelParams,
        bath: &BathParams,
        init: &InitialCondition,
        grid: &TimeGrid,
    ) -> Result<StateSeries> {
        let thermal = 2.0 * bath.n_bar(p.omega) + 1.0;
        let times = grid.times();
        let states = times
            .iter()
            .map(|&t| {
                let closed = closed_evolution(p, init, t)?.mode_a();
                let keep = (-bath.gamma * t).exp();
                let mut s = closed;
                s.sigma = closed.sigma * keep
                    + nalgebra::Matrix2::identity() * ((1.0 - keep) * thermal);
                s.d = closed.d * keep.sqrt();
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StateSeries {
            times,
            states,
            global: None,
        })
    }

    fn asymptote(&self, p: &ModelParams, bath: &BathParams) -> Result<SingleModeState> {
        Ok(bath.thermal_state(p.omega))
    }
}

pub fn dynamics_models() -> Registry<dyn DynamicsModel> {
    Registry::<dyn DynamicsModel>::new()
        .with(Box::new(ReduceThenDissipate))
        .with(Box::new(FullLocalDissipator))
}
