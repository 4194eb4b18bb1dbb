use bimode_core::coupled::{diagonalize, ground_state_coherence, validate_params, ModelParams};
use bimode_core::dynamics::{
    dissipative_evolution, dynamics_models, BathParams, DisplacementFrame, DynamicsModel,
    InitialCondition, InitialCovariance, TimeGrid,
};
use bimode_core::gaussian::SingleModeState;
use bimode_core::thermal::{coherence_infinite_t, frequency_conventions, steady_coherence_with, Temperature};
use bimode_fock::lindblad::{amplitudes, displace, schrodinger_evolve};
use bimode_fock::{coherent_state, ground_state_fock, DensityOperator, FockConfig, LindbladStepper};
use nalgebra::{Matrix2, Vector4};
use rayon::prelude::*;

use crate::sweep::SweepSpec;
use crate::table::{Row, Table};

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Invalid(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Numerical(m) => m,
        }
    }
}

/// A finished table plus the worst row-level failure, if any.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<Failure>,
}

/// Parameters in units of ω; everything is computed at ω = 1 and ω only rescales
/// the printed energies and times.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub omega: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Units {
    pub fn check_omega(&self) -> Result<(), Failure> {
        if self.omega.is_finite() && self.omega > 0.0 {
            Ok(())
        } else {
            Err(Failure::Invalid(format!("omega must be positive, got {}", self.omega)))
        }
    }

    pub fn params(&self) -> Result<ModelParams, Failure> {
        self.check_omega()?;
        ModelParams::new(1.0, self.lambda, self.mu).map_err(|e| Failure::Invalid(e.to_string()))
    }
}

fn worst(a: Option<Failure>, b: Failure) -> Option<Failure> {
    match a {
        Some(f) if f.code() >= b.code() => Some(f),
        _ => Some(b),
    }
}

/// Evaluates `f` over the grid on the worker pool, keeping grid order.
fn sweep_rows(
    values: &[f64],
    display: f64,
    f: impl Fn(f64) -> Result<Vec<f64>, Failure> + Sync,
) -> (Vec<Row>, Option<Failure>) {
    let results: Vec<(f64, Result<Vec<f64>, Failure>)> = values.par_iter().map(|&v| (v, f(v))).collect();
    let mut failure = None;
    let rows = results
        .into_iter()
        .map(|(v, r)| match r {
            Ok(cells) => Row::Values(cells),
            Err(e) => {
                let key = v * display;
                let reason = e.message().to_string();
                failure = worst(failure.take(), e);
                Row::Error { key, reason }
            }
        })
        .collect();
    (rows, failure)
}

pub fn ground(units: Units, sweep: &SweepSpec, flags: Vec<(&'static str, String)>) -> Result<Outcome, Failure> {
    units.check_omega()?;
    sweep.expect_one_of(&["mu", "lambda"]).map_err(Failure::Invalid)?;
    let values = sweep.values();
    let (rows, failure) = sweep_rows(&values, units.omega, |v| {
        let (l, m) = if sweep.name == "mu" { (units.lambda, v) } else { (v, units.mu) };
        let p = ModelParams::new(1.0, l, m).map_err(|e| Failure::Invalid(format!("{}={v}: {e}", sweep.name)))?;
        let c = ground_state_coherence(&p).map_err(|e| Failure::Numerical(e.to_string()))?;
        Ok(vec![v * units.omega, c])
    });
    let mut table = Table::new("ground", flags, vec!["param", "coherence"]);
    table.rows = rows;
    let failure = if failure.is_none() && table.rows.is_empty() {
        Some(Failure::Invalid("empty sweep".into()))
    } else {
        failure
    };
    Ok(Outcome { table, failure })
}

pub fn steady(
    units: Units,
    temps: &[f64],
    convention: &str,
    flags: Vec<(&'static str, String)>,
) -> Result<Outcome, Failure> {
    let p = units.params()?;
    let conventions = frequency_conventions();
    let conv = conventions.get(convention).ok_or_else(|| {
        Failure::Invalid(format!("unknown convention '{convention}' (known: {})", conventions.names().join(", ")))
    })?;
    let plateau = coherence_infinite_t(&p).map_err(|e| Failure::Numerical(e.to_string()))?;
    let (rows, failure) = sweep_rows(temps, units.omega, |t| {
        let temp = Temperature::new(t).map_err(|e| Failure::Invalid(format!("T={t}: {e}")))?;
        let c = steady_coherence_with(&p, temp, conv).map_err(|e| Failure::Numerical(e.to_string()))?;
        Ok(vec![t * units.omega, c, plateau])
    });
    let mut table = Table::new("steady", flags, vec!["T", "coherence", "coherence_infinite_T"]);
    table.rows = rows;
    Ok(Outcome { table, failure })
}

pub struct DynamicsSetup {
    pub units: Units,
    pub bath: BathParams,
    pub init: InitialCondition,
    pub grid: TimeGrid,
    pub mode: String,
    pub verify: Option<usize>,
}

impl DynamicsSetup {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        units: Units,
        gamma: f64,
        temperature: f64,
        d0: [f64; 4],
        frame: DisplacementFrame,
        covariance: InitialCovariance,
        grid: (f64, f64, usize),
        mode: String,
        verify: Option<usize>,
    ) -> Result<Self, Failure> {
        let invalid = |e: bimode_core::Error| Failure::Invalid(e.to_string());
        units.params()?;
        let temp = Temperature::new(temperature).map_err(invalid)?;
        let bath = BathParams::new(gamma, temp).map_err(invalid)?;
        let init = InitialCondition::new(Vector4::from(d0))
            .map_err(invalid)?
            .with_frame(frame)
            .with_covariance(covariance);
        let grid = TimeGrid::new(grid.0, grid.1, grid.2).map_err(invalid)?;
        if dynamics_models().get(&mode).is_none() {
            return Err(Failure::Invalid(format!(
                "unknown mode '{mode}' (known: {})",
                dynamics_models().names().join(", ")
            )));
        }
        Ok(Self {
            units,
            bath,
            init,
            grid,
            mode,
            verify,
        })
    }
}

pub fn dynamics(setup: &DynamicsSetup, flags: Vec<(&'static str, String)>) -> Result<Outcome, Failure> {
    let p = setup.units.params()?;
    let models = dynamics_models();
    let model = models.get(&setup.mode).expect("mode checked in setup");
    let traj = dissipative_evolution(model, &p, &setup.bath, &setup.init, &setup.grid)
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    let mut table = Table::new(
        "dynamics",
        flags,
        vec!["t", "coherence", "fidelity", "Xa", "Pa", "sigma_xx", "sigma_pp", "sigma_xp"],
    );
    for i in 0..traj.len() {
        let s = &traj.states[i];
        table.rows.push(Row::Values(vec![
            traj.times[i] / setup.units.omega,
            traj.coherence[i],
            traj.fidelity[i],
            s.d[0],
            s.d[1],
            s.sigma[(0, 0)],
            s.sigma[(1, 1)],
            s.sigma[(0, 1)],
        ]));
    }
    let mut failure = None;
    if let Some(cutoff) = setup.verify {
        let window = setup.grid.n_steps() as f64 * setup.grid.dt;
        let report = verify(model, &p, &setup.bath, &setup.init, window.min(VERIFY_WINDOW), cutoff)?;
        table.notes.push(report.summary());
        if !report.passed() {
            failure = Some(Failure::Numerical(report.summary()));
        }
    }
    Ok(Outcome { table, failure })
}

/// Longest window compared against the Fock-space oracle (units of 1/ω).
pub const VERIFY_WINDOW: f64 = 5.0;
pub const VERIFY_TOL: f64 = 1e-4;
const VERIFY_DT: f64 = 5e-3;
const VERIFY_SAMPLE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub window: f64,
    pub cutoff: usize,
    pub max_deviation: f64,
    pub leakage: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < VERIFY_TOL && self.leakage < FockConfig::LEAKAGE_TOL
    }

    pub fn summary(&self) -> String {
        format!(
            "verify: max deviation {:.3e} from the Fock-space oracle over t <= {} at cutoff {} (leakage {:.1e}): {}",
            self.max_deviation,
            self.window,
            self.cutoff,
            self.leakage,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

fn max_deviation(a: &SingleModeState, b: &SingleModeState) -> f64 {
    (a.d - b.d).abs().max().max((a.sigma - b.sigma).abs().max())
}

/// Compares the mode-a moments of `model` with a truncated number-basis run: the
/// Lindblad equation for the local dissipator, or unitary evolution followed by the
/// same single-mode channel for reduce-then-dissipate.
pub fn verify(
    model: &dyn DynamicsModel,
    p: &ModelParams,
    bath: &BathParams,
    init: &InitialCondition,
    window: f64,
    cutoff: usize,
) -> Result<VerifyReport, Failure> {
    let numerical = |e: &dyn std::fmt::Display| Failure::Numerical(e.to_string());
    let cfg = FockConfig::new(cutoff).map_err(|e| Failure::Invalid(e.to_string()))?;
    let basis = cfg.basis();
    let steps = (window / VERIFY_DT).round() as usize;
    let stride = (VERIFY_SAMPLE / VERIFY_DT).round() as usize;
    let grid = TimeGrid::new(steps as f64 * VERIFY_DT, VERIFY_DT, stride).map_err(|e| numerical(&e))?;
    let gaussian = model.evolve(p, bath, init, &grid).map_err(|e| numerical(&e))?;

    let s0 = init.state(p).map_err(|e| numerical(&e))?;
    let (aa, ab) = amplitudes(&s0.d);
    let psi0 = match init.covariance {
        InitialCovariance::Vacuum => coherent_state(&basis, aa, ab),
        InitialCovariance::Ground => {
            let g = ground_state_fock(p, &cfg).map_err(|e| numerical(&e))?;
            let DensityOperator::Spectral { vectors, .. } = &g.rho else {
                return Err(Failure::Numerical("ground state is not pure".into()));
            };
            let v: Vec<_> = (0..basis.dim()).map(|i| bimode_fock::c64::new(vectors[(i, 0)], 0.0)).collect();
            displace(&basis, &v, aa, ab)
        }
    };

    let mut oracle: Vec<SingleModeState> = Vec::new();
    let mut leakage: f64 = 0.0;
    if model.name() == "full" {
        let stepper = LindbladStepper::new(p, bath, basis, VERIFY_DT).map_err(|e| numerical(&e))?;
        stepper
            .run(&DensityOperator::pure(&psi0), steps, stride, |_, rho| {
                leakage = leakage.max(basis.leakage(&rho.populations()));
                oracle.push(rho.gaussian_moments(&basis).mode_a());
                Ok(())
            })
            .map_err(|e| numerical(&e))?;
    } else {
        let thermal = 2.0 * bath.n_bar(p.omega) + 1.0;
        let mut psi = psi0;
        for (k, &t) in grid.times().iter().enumerate() {
            if k > 0 {
                let prev = grid.times()[k - 1];
                psi = schrodinger_evolve(p, &basis, &psi, t - prev, VERIFY_DT).map_err(|e| numerical(&e))?;
            }
            let rho = DensityOperator::pure(&psi);
            leakage = leakage.max(basis.leakage(&rho.populations()));
            let mut s = rho.gaussian_moments(&basis).mode_a();
            let keep = (-bath.gamma * t).exp();
            s.sigma = s.sigma * keep + Matrix2::identity() * ((1.0 - keep) * thermal);
            s.d *= keep.sqrt();
            oracle.push(s);
        }
    }
    if oracle.len() != gaussian.states.len() {
        return Err(Failure::Numerical("oracle and model sampled different grids".into()));
    }
    let max_dev = oracle
        .iter()
        .zip(&gaussian.states)
        .map(|(a, b)| max_deviation(a, b))
        .fold(0.0, f64::max);
    Ok(VerifyReport {
        window: grid.n_steps() as f64 * VERIFY_DT,
        cutoff,
        max_deviation: max_dev,
        leakage,
    })
}

/// Human-readable parameter report; the checks are listed even when one fails.
pub fn validate(units: Units) -> (Vec<(String, String)>, Option<Failure>) {
    let mut lines = Vec::new();
    let failure = validate_into(units, &mut lines).err();
    (lines, failure)
}

fn validate_into(units: Units, lines: &mut Vec<(String, String)>) -> Result<(), Failure> {
    units.check_omega()?;
    let (l, m) = (units.lambda, units.mu);
    let mark = |ok: bool| if ok { "ok" } else { "violated" }.to_string();
    lines.extend([
        ("omega".to_string(), units.omega.to_string()),
        ("lambda".to_string(), format!("{l} omega")),
        ("mu".to_string(), format!("{m} omega")),
        ("lambda, mu >= 0".to_string(), mark(l >= 0.0 && m >= 0.0)),
        ("omega > lambda + mu".to_string(), mark(1.0 > l + m)),
        ("2 lambda < omega".to_string(), mark(2.0 * l < 1.0)),
    ]);
    let p = validate_params(ModelParams {
        omega: 1.0,
        lambda: l,
        mu: m,
    })
    .map_err(|e| Failure::Invalid(e.to_string()))?;
    let d = diagonalize(&p).map_err(|e| Failure::Numerical(e.to_string()))?;
    let w = units.omega;
    for (k, v) in [
        ("Lambda_plus", d.lambda_plus * w),
        ("Lambda_minus", d.lambda_minus * w),
        ("kappa1", d.kappa1 * w),
        ("kappa2", d.kappa2 * w),
        ("r_a", d.r_a),
        ("r_b", d.r_b),
        ("ground_coherence", ground_state_coherence(&p).map_err(|e| Failure::Numerical(e.to_string()))?),
    ] {
        lines.push((k.to_string(), crate::table::fmt_num(v)));
    }
    Ok(())
}
