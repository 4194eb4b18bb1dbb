//! Two bosonic modes coupled by exchange (`λ`) and two-mode squeezing (`μ`):
//! `H = ω(a†a + b†b) + λ(a†b + ab†) + μ(a†b† + ab)`.
//!
//! Natural-unit position and momentum are `x = (c + c†)/√(2ω)` and
//! `p = i√(ω/2)(c† − c)`; covariances handed to [`crate::gaussian`] are rescaled to the
//! dimensionless convention `σ_XX = 2ω⟨x²⟩`, `σ_PP = (2/ω)⟨p²⟩`.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{coherence, TwoModeState};

/// Parameters closer than this (relative to `ω`) to a stability boundary are rejected.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub omega: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ModelParams {
    /// Builds and validates in one go.
    pub fn new(omega: f64, lambda: f64, mu: f64) -> Result<Self> {
        validate_params(Self { omega, lambda, mu })
    }

    /// Same couplings expressed in units of `ω` (so `ω = 1`).
    pub fn scaled(&self) -> (f64, f64) {
        (self.lambda / self.omega, self.mu / self.omega)
    }

    pub fn is_decoupled(&self) -> bool {
        self.lambda == 0.0 && self.mu == 0.0
    }
}

/// Checks `λ, μ ≥ 0`, `ω > λ + μ` and `2λ < ω`, each with a margin of
/// `BOUNDARY_TOL · ω`.
pub fn validate_params(p: ModelParams) -> Result<ModelParams> {
    let ModelParams { omega, lambda, mu } = p;
    if !(omega.is_finite() && lambda.is_finite() && mu.is_finite()) {
        return Err(Error::Instability("non-finite parameter".into()));
    }
    if omega <= 0.0 {
        return Err(Error::Instability(format!("omega = {omega} must be positive")));
    }
    if lambda < 0.0 || mu < 0.0 {
        return Err(Error::Instability(format!(
            "negative coupling (lambda = {lambda}, mu = {mu})"
        )));
    }
    let margin = BOUNDARY_TOL * omega;
    if omega - (lambda + mu) <= margin {
        return Err(Error::Instability(format!(
            "omega <= lambda + mu ({omega} <= {})",
            lambda + mu
        )));
    }
    if omega - 2.0 * lambda <= margin {
        return Err(Error::Instability(format!(
            "2 lambda >= omega ({} >= {omega})",
            2.0 * lambda
        )));
    }
    Ok(p)
}

/// Normal-mode frequencies `Λ± = √((ω ± λ)² − μ²)`.
///
/// This is the form for which the Bogoliubov operators below satisfy `[α, H] = Λ₊α`
/// and `[β, H] = Λ₋β`.
pub fn normal_mode_frequencies(p: &ModelParams) -> (f64, f64) {
    let ModelParams { omega, lambda, mu } = *p;
    let plus = ((omega + lambda + mu) * (omega + lambda - mu)).sqrt();
    let minus = ((omega - lambda - mu) * (omega - lambda + mu)).sqrt();
    (plus, minus)
}

/// The alternative closed form `√(ω² + λ² − μ² ± 2λμ)`. It coincides with
/// [`normal_mode_frequencies`] only at `λ = 0`.
pub fn printed_normal_mode_frequencies(p: &ModelParams) -> (f64, f64) {
    let ModelParams { omega, lambda, mu } = *p;
    let base = omega * omega + lambda * lambda - mu * mu;
    (
        (base + 2.0 * lambda * mu).sqrt(),
        (base - 2.0 * lambda * mu).sqrt(),
    )
}

/// Every intermediate quantity of the two-step diagonalization: centre-of-mass /
/// relative rotation (`c1..c4`, `ω±`), then a single-mode squeeze per sector (`r_a`, `r_b`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalizationResult {
    pub params: ModelParams,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

/// `α = alpha.0 (a + b) + alpha.1 (a† + b†)`, `β = beta.0 (a − b) + beta.1 (a† − b†)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalModeOperators {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

fn squeeze_angle(arg: f64, label: &str) -> Result<f64> {
    if !(arg.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "arctanh argument for {label} is {arg}, outside (-1, 1)"
        )));
    }
    Ok(-0.5 * arg.atanh())
}

pub fn diagonalize(p: &ModelParams) -> Result<DiagonalizationResult> {
    let p = validate_params(*p)?;
    let ModelParams { omega: w, lambda: l, mu: m } = p;

    let omega_plus = (w * w + 2.0 * l * w).sqrt();
    let omega_minus = (w * w - 2.0 * l * w).sqrt();
    let c1 = (omega_plus / w).sqrt() + (w / omega_plus).sqrt();
    let c2 = (omega_plus / w).sqrt() - (w / omega_plus).sqrt();
    let c3 = (omega_minus / w).sqrt() + (w / omega_minus).sqrt();
    let c4 = (omega_minus / w).sqrt() - (w / omega_minus).sqrt();

    let theta_plus = (l * l + w * w - l * m + 2.0 * l * w) / (w * (w + 2.0 * l)).sqrt();
    let theta_minus = (l * l + w * w - l * m - 2.0 * l * w) / (w * (w - 2.0 * l)).sqrt();
    let zeta_plus = (m - l) * (l + w) / (2.0 * (w * (w + 2.0 * l)).sqrt());
    let zeta_minus = (m - l) * (l - w) / (2.0 * (w * (w - 2.0 * l)).sqrt());

    let r_a = squeeze_angle(
        (l - m) * (l + w) / (l * l - l * m + 2.0 * l * w + w * w),
        "r_a",
    )?;
    let r_b = squeeze_angle(
        (l - m) * (l - w) / (l * l - l * m - 2.0 * l * w + w * w),
        "r_b",
    )?;

    let (lambda_plus, lambda_minus) = normal_mode_frequencies(&p);
    let (kappa1, kappa2) = kappas_unchecked(&p);

    Ok(DiagonalizationResult {
        params: p,
        omega_plus,
        omega_minus,
        lambda_plus,
        lambda_minus,
        kappa1,
        kappa2,
        r_a,
        r_b,
        c1,
        c2,
        c3,
        c4,
        theta_plus,
        theta_minus,
        zeta_plus,
        zeta_minus,
    })
}

pub(crate) fn kappas_unchecked(p: &ModelParams) -> (f64, f64) {
    let ModelParams { omega: w, lambda: l, mu: m } = *p;
    (
        w * (w + l + m).sqrt() / (4.0 * (w + l - m).sqrt()),
        w * (w - l - m).sqrt() / (4.0 * (w - l + m).sqrt()),
    )
}

/// Exponents of the ground-state wavefunction
/// `Ψ ∝ exp[−κ₁(x_a + x_b)² − κ₂(x_a − x_b)²]`.
pub fn ground_wavefunction_params(p: &ModelParams) -> Result<(f64, f64)> {
    Ok(kappas_unchecked(&validate_params(*p)?))
}

/// Ground-state wavefunction in natural units.
pub fn ground_wavefunction(kappa1: f64, kappa2: f64, xa: f64, xb: f64) -> f64 {
    let norm = 2.0 * (kappa1 * kappa2).powf(0.25) / std::f64::consts::PI.sqrt();
    norm * (-kappa1 * (xa + xb).powi(2) - kappa2 * (xa - xb).powi(2)).exp()
}

impl DiagonalizationResult {
    pub fn operators(&self) -> NormalModeOperators {
        let s8 = 8f64.sqrt();
        let (ua, va) = (self.r_a.cosh(), self.r_a.sinh());
        let (ub, vb) = (self.r_b.cosh(), self.r_b.sinh());
        NormalModeOperators {
            alpha: (
                (self.c1 * ua + self.c2 * va) / s8,
                (self.c2 * ua + self.c1 * va) / s8,
            ),
            beta: (
                (self.c3 * ub + self.c4 * vb) / s8,
                (self.c4 * ub + self.c3 * vb) / s8,
            ),
        }
    }

    /// Constant in `H = Λ₊α†α + Λ₋β†β + E₀`.
    pub fn ground_energy(&self) -> f64 {
        0.5 * (self.lambda_plus + self.lambda_minus) - self.params.omega
    }

    /// Quadratic form of `Λ₊α†α + Λ₋β†β` in canonical quadratures
    /// `(x̃_a, p̃_a, x̃_b, p̃_b)` with `a = (x̃ + ip̃)/√2`. Should equal
    /// [`hamiltonian_quadratic_form`].
    pub fn reconstructed_quadratic_form(&self) -> Matrix4<f64> {
        let ops = self.operators();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ux = Vector4::new(h, 0.0, h, 0.0);
        let up = Vector4::new(0.0, h, 0.0, h);
        let vx = Vector4::new(h, 0.0, -h, 0.0);
        let vp = Vector4::new(0.0, h, 0.0, -h);
        let (pa, qa) = ops.alpha;
        let (pb, qb) = ops.beta;
        2.0 * self.lambda_plus
            * ((pa + qa).powi(2) * ux * ux.transpose() + (pa - qa).powi(2) * up * up.transpose())
            + 2.0
                * self.lambda_minus
                * ((pb + qb).powi(2) * vx * vx.transpose()
                    + (pb - qb).powi(2) * vp * vp.transpose())
    }
}

/// Hessian of `H` in canonical quadratures: `(ω/2)Σ(x̃² + p̃²) + (λ + μ)x̃_a x̃_b + (λ − μ)p̃_a p̃_b`.
pub fn hamiltonian_quadratic_form(p: &ModelParams) -> Matrix4<f64> {
    let ModelParams { omega: w, lambda: l, mu: m } = *p;
    Matrix4::new(
        w, 0.0, l + m, 0.0, //
        0.0, w, 0.0, l - m, //
        l + m, 0.0, w, 0.0, //
        0.0, l - m, 0.0, w,
    )
}

/// Diagonal rescaling that takes natural-unit `(x_a, p_a, x_b, p_b)` to dimensionless
/// quadratures.
pub fn natural_to_dimensionless(omega: f64) -> Vector4<f64> {
    let sx = (2.0 * omega).sqrt();
    let sp = (2.0 / omega).sqrt();
    Vector4::new(sx, sp, sx, sp)
}

/// Builds a dimensionless state from natural-unit second moments of the
/// x/p block-diagonal pattern.
pub fn state_from_natural_moments(
    omega: f64,
    xx: f64,
    xaxb: f64,
    pp: f64,
    papb: f64,
) -> Result<TwoModeState> {
    let nat = Matrix4::new(
        xx, 0.0, xaxb, 0.0, //
        0.0, pp, 0.0, papb, //
        xaxb, 0.0, xx, 0.0, //
        0.0, papb, 0.0, pp,
    );
    let s = Matrix4::from_diagonal(&natural_to_dimensionless(omega));
    TwoModeState::new(Vector4::zeros(), s * nat * s)
}

/// Ground-state covariance from the κ exponents:
/// `⟨x_a²⟩ = (1/κ₁ + 1/κ₂)/16`, `⟨x_a x_b⟩ = (1/κ₁ − 1/κ₂)/16`,
/// `⟨p_a²⟩ = κ₁ + κ₂`, `⟨p_a p_b⟩ = κ₁ − κ₂`.
pub fn ground_state_covariance(p: &ModelParams) -> Result<TwoModeState> {
    let p = validate_params(*p)?;
    let (k1, k2) = kappas_unchecked(&p);
    state_from_natural_moments(
        p.omega,
        (1.0 / k1 + 1.0 / k2) / 16.0,
        (1.0 / k1 - 1.0 / k2) / 16.0,
        k1 + k2,
        k1 - k2,
    )
}

pub fn ground_state_coherence(p: &ModelParams) -> Result<f64> {
    coherence(&ground_state_covariance(p)?)
}

/// Symplectic map from dimensionless `(X_a, P_a, X_b, P_b)` to normal-mode quadratures
/// `(Q₊, P₊, Q₋, P₋)`, in which the ground state has identity covariance and
/// `H = Σ± (Λ±/2)(Q±² + P±²)` up to a constant.
pub fn normal_mode_transform(p: &ModelParams) -> Matrix4<f64> {
    let ModelParams { omega: w, lambda: l, mu: m } = *p;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rot = Matrix4::new(
        h, 0.0, h, 0.0, //
        0.0, h, 0.0, h, //
        h, 0.0, -h, 0.0, //
        0.0, h, 0.0, -h,
    );
    // ground-state variance of (X_a ± X_b)/√2
    let c_plus = ((w + l - m) / (w + l + m)).sqrt();
    let c_minus = ((w - l + m) / (w - l - m)).sqrt();
    let scale = Matrix4::from_diagonal(&Vector4::new(
        1.0 / c_plus.sqrt(),
        c_plus.sqrt(),
        1.0 / c_minus.sqrt(),
        c_minus.sqrt(),
    ));
    scale * rot
}
