//! Steady state when both modes sit in identical Markovian baths at temperature `T`:
//! a Gibbs state of the normal modes, `ρ ∝ exp(−Λ₊α†α/T) ⊗ exp(−Λ₋β†β/T)`.

use nalgebra::Vector4;
use serde::Serialize;

use crate::coupled::{kappas_unchecked, normal_mode_frequencies, printed_normal_mode_frequencies};
use crate::coupled::{natural_to_dimensionless, state_from_natural_moments, validate_params, ModelParams};
use crate::error::{Error, Result};
use crate::gaussian::{coherence, TwoModeState};
use crate::registry::{Named, Registry};

/// Bath temperature in units of `ω` (`k_B = ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Temperature(f64);

impl Temperature {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 0.0) || t.is_infinite() {
            return Err(Error::Domain(format!("temperature must be finite and >= 0, got {t}")));
        }
        Ok(Self(t))
    }

    pub const ZERO: Self = Self(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// `tanh(Λ/2T)`, exactly 1 at `T = 0`.
    pub fn tanh_half(self, freq: f64) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            (freq / (2.0 * self.0)).tanh()
        }
    }

    /// Bose–Einstein occupation `1/(e^{Λ/T} − 1)`.
    pub fn occupation(self, freq: f64) -> f64 {
        if self.0 == 0.0 {
            0.0
        } else {
            1.0 / (freq / self.0).exp_m1()
        }
    }
}

/// Which pair of normal-mode frequencies enters the Boltzmann weights.
pub trait FrequencyConvention: Named + Send + Sync {
    fn frequencies(&self, p: &ModelParams) -> (f64, f64);
}

/// `Λ± = √((ω ± λ)² − μ²)`: the spectrum of `H` itself, i.e. a true Gibbs state.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

/// `Λ± = √(ω² + λ² − μ² ± 2λμ)`, the closed form quoted alongside the published
/// temperature curves. Only equal to [`Exact`] at `λ = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Printed;

impl Named for Exact {
    fn name(&self) -> &'static str {
        "exact"
    }
    fn description(&self) -> &'static str {
        "normal-mode frequencies of the Hamiltonian"
    }
}

impl FrequencyConvention for Exact {
    fn frequencies(&self, p: &ModelParams) -> (f64, f64) {
        normal_mode_frequencies(p)
    }
}

impl Named for Printed {
    fn name(&self) -> &'static str {
        "printed"
    }
    fn description(&self) -> &'static str {
        "sqrt(w^2 + l^2 - m^2 +/- 2 l m); reproduces the published T-curves"
    }
}

impl FrequencyConvention for Printed {
    fn frequencies(&self, p: &ModelParams) -> (f64, f64) {
        printed_normal_mode_frequencies(p)
    }
}

pub fn frequency_conventions() -> Registry<dyn FrequencyConvention> {
    Registry::<dyn FrequencyConvention>::new()
        .with(Box::new(Exact))
        .with(Box::new(Printed))
}

pub fn steady_state_covariance(p: &ModelParams, t: Temperature) -> Result<TwoModeState> {
    steady_state_covariance_with(p, t, &Exact)
}

/// Ground-state moments with `κ → κ/tanh(Λ/2T)` and `1/κ → 1/(κ tanh(Λ/2T))` in each
/// normal-mode sector.
pub fn steady_state_covariance_with(
    p: &ModelParams,
    t: Temperature,
    conv: &dyn FrequencyConvention,
) -> Result<TwoModeState> {
    let p = validate_params(*p)?;
    let (k1, k2) = kappas_unchecked(&p);
    let (lp, lm) = conv.frequencies(&p);
    let (tp, tm) = (t.tanh_half(lp), t.tanh_half(lm));
    state_from_natural_moments(
        p.omega,
        (1.0 / (k1 * tp) + 1.0 / (k2 * tm)) / 16.0,
        (1.0 / (k1 * tp) - 1.0 / (k2 * tm)) / 16.0,
        k1 / tp + k2 / tm,
        k1 / tp - k2 / tm,
    )
}

pub fn steady_coherence(p: &ModelParams, t: Temperature) -> Result<f64> {
    coherence(&steady_state_covariance(p, t)?)
}

pub fn steady_coherence_with(
    p: &ModelParams,
    t: Temperature,
    conv: &dyn FrequencyConvention,
) -> Result<f64> {
    coherence(&steady_state_covariance_with(p, t, conv)?)
}

/// `T → ∞` limit of [`steady_coherence`], `2 ln(Δ₁ + Δ₂) − ½ ln(Δ₃² − Δ₄²)` with
/// `λ, μ` in units of `ω` and `δ± = λ ± μ`.
///
/// `√(δ₊ − 1)/√(δ₋ − 1)` is taken as `√((1 − δ₊)/(1 − δ₋))`. Compared with the
/// commonly quoted form, `Δ₂` carries an extra factor 2 and `Δ₄` an extra `μ`; without
/// them the expression is nonzero for uncoupled modes and misses the numerical limit.
pub fn coherence_infinite_t(p: &ModelParams) -> Result<f64> {
    let p = validate_params(*p)?;
    let (l, m) = p.scaled();
    let (dp, dm) = (l + m, l - m);
    let d1 = 1.0 / (2.0 * (1.0 + dp)) + 1.0 / (2.0 * (1.0 + dm));
    let d2 = 2.0
        * (((1.0 - dp) / (1.0 - dm)).sqrt() / (4.0 * ((l - 1.0).powi(2) - m * m).sqrt())
            + 1.0 / (4.0 * (1.0 - dp).abs()));
    let den = l.powi(4) + (m * m - 1.0).powi(2) - 2.0 * l * l * (m * m + 1.0);
    let d3 = 4.0 * (1.0 - l * l - m * m) / den;
    let d4 = -8.0 * l * m / den.abs();
    let c = 2.0 * (d1 + d2).ln() - 0.5 * (d3 * d3 - d4 * d4).ln();
    Ok(if c.abs() < 1e-12 { 0.0 } else { c })
}

/// Same expression without the two corrections in [`coherence_infinite_t`]; kept for
/// comparison only.
pub fn coherence_infinite_t_uncorrected(p: &ModelParams) -> Result<f64> {
    let p = validate_params(*p)?;
    let (l, m) = p.scaled();
    let (dp, dm) = (l + m, l - m);
    let d1 = 1.0 / (2.0 * (1.0 + dp)) + 1.0 / (2.0 * (1.0 + dm));
    let d2 = ((1.0 - dp) / (1.0 - dm)).sqrt() / (4.0 * ((l - 1.0).powi(2) - m * m).sqrt())
        + 1.0 / (4.0 * (1.0 - dp).abs());
    let den = l.powi(4) + (m * m - 1.0).powi(2) - 2.0 * l * l * (m * m + 1.0);
    let d3 = 4.0 * (1.0 - l * l - m * m) / den;
    let d4 = -8.0 * l / den.abs();
    Ok(2.0 * (d1 + d2).ln() - 0.5 * (d3 * d3 - d4 * d4).ln())
}

/// Squared Gaussian widths of the steady Wigner function in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaFactors {
    pub eta1_sq: f64,
    pub eta2_sq: f64,
    pub eta3_sq: f64,
    pub eta4_sq: f64,
}

impl EtaFactors {
    pub fn new(p: &ModelParams) -> Result<Self> {
        let ModelParams { omega: w, lambda: l, mu: m } = validate_params(*p)?;
        Ok(Self {
            eta1_sq: (w + l - m).sqrt() / (2.0 * w * (w + l + m).sqrt()),
            eta2_sq: w * (w + l + m).sqrt() / (2.0 * (w + l - m).sqrt()),
            eta3_sq: (w - l + m).sqrt() / (2.0 * w * (w - l - m).sqrt()),
            eta4_sq: w * (w - l - m).sqrt() / (2.0 * (w - l + m).sqrt()),
        })
    }
}

/// Steady-state Wigner function at `point = (x_a, p_a, x_b, p_b)` in natural units.
pub fn wigner_steady(p: &ModelParams, t: Temperature, point: &Vector4<f64>) -> Result<f64> {
    wigner_steady_with(p, t, point, &Exact)
}

pub fn wigner_steady_with(
    p: &ModelParams,
    t: Temperature,
    point: &Vector4<f64>,
    conv: &dyn FrequencyConvention,
) -> Result<f64> {
    let eta = EtaFactors::new(p)?;
    let (lp, lm) = conv.frequencies(p);
    let (tp, tm) = (t.tanh_half(lp), t.tanh_half(lm));
    let (xa, pa, xb, pb) = (point[0], point[1], point[2], point[3]);
    let exponent = tp * ((xa + xb).powi(2) / (4.0 * eta.eta1_sq) + (pa + pb).powi(2) / (4.0 * eta.eta2_sq))
        + tm * ((xa - xb).powi(2) / (4.0 * eta.eta3_sq) + (pa - pb).powi(2) / (4.0 * eta.eta4_sq));
    Ok(tp * tm / std::f64::consts::PI.powi(2) * (-exponent).exp())
}

/// Natural-unit point → dimensionless quadratures, with the Jacobian that converts a
/// dimensionless density into a natural-unit one.
pub fn dimensionless_point(omega: f64, point: &Vector4<f64>) -> (Vector4<f64>, f64) {
    let s = natural_to_dimensionless(omega);
    (point.component_mul(&s), s.iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupled::{ground_state_coherence, ground_state_covariance};
    use crate::gaussian::{wigner_density, GaussianState};
    use approx::assert_abs_diff_eq;

    fn params(l: f64, m: f64) -> ModelParams {
        ModelParams::new(1.0, l, m).unwrap()
    }

    #[test]
    fn negative_temperature_rejected() {
        assert!(Temperature::new(-0.1).is_err());
        assert!(Temperature::new(f64::NAN).is_err());
        assert!(Temperature::new(0.0).is_ok());
    }

    #[test]
    fn zero_temperature_is_ground_state() {
        for &(l, m) in &[(0.0, 0.0), (0.3, 0.2), (0.0, 0.5), (0.45, 0.5)] {
            let s = steady_state_covariance(&params(l, m), Temperature::ZERO).unwrap();
            let g = ground_state_covariance(&params(l, m)).unwrap();
            assert_eq!(s.sigma, g.sigma);
        }
    }

    #[test]
    fn uncoupled_thermal_example() {
        let s = steady_state_covariance(&params(0.0, 0.0), Temperature::new(1.0).unwrap()).unwrap();
        let coth = 1.0 / 0.5f64.tanh();
        assert!((s.sigma - nalgebra::Matrix4::identity() * coth).abs().max() < 1e-14);
        assert_abs_diff_eq!(coth, 2.163_953_413_738_652, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_is_thermal_in_normal_modes() {
        let p = params(0.3, 0.3);
        let t = Temperature::new(0.7).unwrap();
        let (lp, lm) = normal_mode_frequencies(&p);
        let nu = steady_state_covariance(&p, t).unwrap().spectrum().unwrap();
        let mut want = [1.0 / t.tanh_half(lp), 1.0 / t.tanh_half(lm)];
        want.sort_by(|a, b| b.total_cmp(a));
        assert_abs_diff_eq!(nu.values()[0], want[0], epsilon = 1e-9);
        assert_abs_diff_eq!(nu.values()[1], want[1], epsilon = 1e-9);
    }

    #[test]
    fn squeezing_only_limit_consistency() {
        let p = params(0.0, 0.5);
        assert_eq!(
            steady_coherence(&p, Temperature::ZERO).unwrap(),
            ground_state_coherence(&p).unwrap()
        );
    }

    #[test]
    fn exchange_softens_thermal_decay() {
        let t = Temperature::new(2.0).unwrap();
        assert!(steady_coherence(&params(0.4, 0.3), t).unwrap() > steady_coherence(&params(0.0, 0.3), t).unwrap());
    }

    #[test]
    fn conventions_agree_without_exchange() {
        let reg = frequency_conventions();
        assert_eq!(reg.names(), vec!["exact", "printed"]);
        let p = params(0.0, 0.4);
        let t = Temperature::new(1.3).unwrap();
        let a = steady_coherence_with(&p, t, reg.get("exact").unwrap()).unwrap();
        let b = steady_coherence_with(&p, t, reg.get("printed").unwrap()).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }

    #[test]
    fn printed_convention_has_no_coherence_without_squeezing() {
        let t = Temperature::new(1.0).unwrap();
        let c = steady_coherence_with(&params(0.5 - 1e-6, 0.0), t, &Printed).unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn infinite_temperature_values() {
        assert_eq!(coherence_infinite_t(&params(0.0, 0.0)).unwrap(), 0.0);
        // λ = 0: ln(1/(1 − μ²)), the mutual information of the infinitely hot state
        let c = coherence_infinite_t(&params(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(c, (1.0f64 / 0.75).ln(), epsilon = 1e-12);
        let hot = Temperature::new(1e4).unwrap();
        for &(l, m) in &[(0.0, 0.3), (0.4, 0.3), (0.3, 0.5), (0.2, 0.1)] {
            let p = params(l, m);
            let limit = coherence_infinite_t(&p).unwrap();
            let numeric = steady_coherence(&p, hot).unwrap();
            assert!((limit - numeric).abs() < 1e-6, "({l},{m}) {limit} vs {numeric}");
        }
        assert!(coherence_infinite_t_uncorrected(&params(0.0, 0.0)).unwrap() < -0.5);
    }

    #[test]
    fn infinite_temperature_rescales_with_omega() {
        let a = coherence_infinite_t(&ModelParams::new(2.0, 0.6, 0.4).unwrap()).unwrap();
        let b = coherence_infinite_t(&params(0.3, 0.2)).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }

    #[test]
    fn eta_factors_from_kappas() {
        let p = params(0.2, 0.3);
        let (k1, k2) = kappas_unchecked(&p);
        let e = EtaFactors::new(&p).unwrap();
        assert_abs_diff_eq!(e.eta1_sq, 1.0 / (8.0 * k1), epsilon = 1e-15);
        assert_abs_diff_eq!(e.eta2_sq, 2.0 * k1, epsilon = 1e-15);
        assert_abs_diff_eq!(e.eta3_sq, 1.0 / (8.0 * k2), epsilon = 1e-15);
        assert_abs_diff_eq!(e.eta4_sq, 2.0 * k2, epsilon = 1e-15);
    }

    #[test]
    fn wigner_peak_and_vacuum() {
        let w0 = wigner_steady(&params(0.0, 0.0), Temperature::ZERO, &Vector4::zeros()).unwrap();
        assert_abs_diff_eq!(w0, 1.0 / std::f64::consts::PI.powi(2), epsilon = 1e-15);
        let p = params(0.3, 0.1);
        let t = Temperature::new(0.8).unwrap();
        let (lp, lm) = normal_mode_frequencies(&p);
        let peak = wigner_steady(&p, t, &Vector4::zeros()).unwrap();
        assert_abs_diff_eq!(peak, t.tanh_half(lp) * t.tanh_half(lm) / std::f64::consts::PI.powi(2), epsilon = 1e-15);
    }

    #[test]
    fn wigner_matches_moment_based_density() {
        let p = params(0.2, 0.2);
        let t = Temperature::new(1.0).unwrap();
        let state = steady_state_covariance(&p, t).unwrap();
        for point in [
            Vector4::new(0.3, -0.2, 0.7, 0.1),
            Vector4::new(-1.1, 0.4, 0.2, -0.9),
            Vector4::new(0.0, 0.0, 0.5, 0.5),
        ] {
            let (x, jac) = dimensionless_point(p.omega, &point);
            let want = jac * wigner_density(&state, &x).unwrap();
            let got = wigner_steady(&p, t, &point).unwrap();
            assert!((got - want).abs() < 1e-10 * want.max(1e-3), "{got} vs {want}");
        }
    }
}
