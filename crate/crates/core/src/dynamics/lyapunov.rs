//! Drift–diffusion flow `d′ = A d`, `σ′ = Aσ + σAᵀ + D` for a local thermal
//! dissipator on mode a, and its fixed point.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector4};

use crate::coupled::{hamiltonian_quadratic_form, ModelParams};
use crate::error::{Error, Result};
use crate::gaussian::{symplectic_pair_unchecked, SingleModeState, TwoModeState, PHYSICALITY_TOL};

use super::BathParams;

fn omega4() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

fn projector_a() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 0.0, 0.0))
}

/// `A = Ω H − (Γ/2) P_a`.
pub fn drift(p: &ModelParams, bath: &BathParams) -> Matrix4<f64> {
    omega4() * hamiltonian_quadratic_form(p) - projector_a() * (0.5 * bath.gamma)
}

/// `D = Γ(2n̄ + 1) P_a`.
pub fn diffusion(p: &ModelParams, bath: &BathParams) -> Matrix4<f64> {
    projector_a() * (bath.gamma * (2.0 * bath.n_bar(p.omega) + 1.0))
}

/// Fixed-step classical RK4 on `(d, σ)`.
#[derive(Debug, Clone)]
pub struct MomentIntegrator {
    pub a: Matrix4<f64>,
    pub diff: Matrix4<f64>,
    pub dt: f64,
}

impl MomentIntegrator {
    pub fn new(p: &ModelParams, bath: &BathParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            a: drift(p, bath),
            diff: diffusion(p, bath),
            dt,
        })
    }

    fn sigma_rhs(&self, s: &Matrix4<f64>) -> Matrix4<f64> {
        let as_ = self.a * s;
        as_ + as_.transpose() + self.diff
    }

    pub fn step(&self, d: &mut Vector4<f64>, s: &mut Matrix4<f64>) {
        let h = self.dt;
        let a = &self.a;
        let k1 = a * *d;
        let k2 = a * (*d + k1 * (0.5 * h));
        let k3 = a * (*d + k2 * (0.5 * h));
        let k4 = a * (*d + k3 * h);
        *d += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);

        let l1 = self.sigma_rhs(s);
        let l2 = self.sigma_rhs(&(*s + l1 * (0.5 * h)));
        let l3 = self.sigma_rhs(&(*s + l2 * (0.5 * h)));
        let l4 = self.sigma_rhs(&(*s + l3 * h));
        *s += (l1 + 2.0 * l2 + 2.0 * l3 + l4) * (h / 6.0);
        // keep exact symmetry against round-off drift
        *s = (*s + s.transpose()) * 0.5;
    }

    /// Integrates from `init`, recording every `stride`-th step (and `t = 0`).
    pub fn run(
        &self,
        init: &TwoModeState,
        n_steps: usize,
        stride: usize,
    ) -> Result<Vec<(f64, TwoModeState)>> {
        let stride = stride.max(1);
        if !self.step_is_stable(self.dt) {
            let mut suggested = self.dt / 2.0;
            while !self.step_is_stable(suggested) {
                suggested /= 2.0;
            }
            return Err(Error::Integrator {
                time: 0.0,
                reason: "step outside the RK4 stability region of the drift".into(),
                suggested_dt: suggested,
            });
        }
        let mut d = init.d;
        let mut s = init.sigma;
        let mut out = Vec::with_capacity(n_steps / stride + 2);
        out.push((0.0, *init));
        for k in 1..=n_steps {
            self.step(&mut d, &mut s);
            if k % stride == 0 || k == n_steps {
                let t = k as f64 * self.dt;
                self.check(t, &d, &s)?;
                out.push((t, TwoModeState { d, sigma: s }));
            }
        }
        Ok(out)
    }

    /// Whether the RK4 amplification `1 + z + z²/2 + z³/6 + z⁴/24`, `z = hλ`, stays
    /// inside the unit circle for every non-growing eigenmode `λ` of the drift.
    pub fn step_is_stable(&self, h: f64) -> bool {
        self.a.complex_eigenvalues().iter().all(|&l| {
            if l.re > 0.0 {
                return true;
            }
            let z = l * h;
            let g = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
            g.norm() <= 1.0 + 1e-12
        })
    }

    fn check(&self, t: f64, d: &Vector4<f64>, s: &Matrix4<f64>) -> Result<()> {
        let fail = |reason: String| Error::Integrator {
            time: t,
            reason,
            suggested_dt: self.dt / 2.0,
        };
        if d.iter().chain(s.iter()).any(|x| !x.is_finite()) {
            return Err(fail("non-finite moments".into()));
        }
        let (_, nu_min) = symplectic_pair_unchecked(s);
        if nu_min < 1.0 - PHYSICALITY_TOL || s.determinant() <= 0.0 {
            return Err(fail(format!("symplectic eigenvalue {nu_min} < 1")));
        }
        Ok(())
    }
}

/// Largest real part in the spectrum of `A`.
pub fn spectral_abscissa(a: &Matrix4<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Solves `Aσ + σAᵀ + D = 0` through its `n² × n²` Kronecker form.
fn solve_lyapunov(a: &DMatrix<f64>, diff: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    // column-major vec: vec(Aσ) = (I ⊗ A) vec σ, vec(σAᵀ) = (A ⊗ I) vec σ
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -DVector::from_column_slice(diff.as_slice());
    // spectrum of the operator is {λ_i + λ_j}
    let eig = a.complex_eigenvalues();
    let gap = eig
        .iter()
        .flat_map(|x| eig.iter().map(move |y| (x + y).norm()))
        .fold(f64::INFINITY, f64::min);
    if !(gap > 1e-12 * a.abs().max().max(1.0)) {
        return Err(Error::Degenerate(format!(
            "Lyapunov operator is singular (min |λi + λj| = {gap:.3e})"
        )));
    }
    let lu = op.lu();
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("Lyapunov operator is singular".into()))?;
    let s = DMatrix::from_column_slice(n, n, x.as_slice());
    Ok((&s + s.transpose()) * 0.5)
}

/// Unique fixed point of the local-dissipator flow, reduced to mode a.
///
/// With both couplings off the b block is undamped and the full Lyapunov operator
/// is singular; mode a then relaxes on its own and only its block is solved.
pub fn asymptotic_state_full(p: &ModelParams, bath: &BathParams) -> Result<SingleModeState> {
    if !(bath.gamma > 0.0) {
        return Err(Error::Domain("asymptotic state needs gamma > 0".into()));
    }
    let a = drift(p, bath);
    let diff = diffusion(p, bath);
    let sigma_a: Matrix2<f64> = if p.is_decoupled() {
        let a2 = DMatrix::from_iterator(2, 2, a.fixed_view::<2, 2>(0, 0).iter().copied());
        let d2 = DMatrix::from_iterator(2, 2, diff.fixed_view::<2, 2>(0, 0).iter().copied());
        let s = solve_lyapunov(&a2, &d2)?;
        Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)])
    } else {
        let abscissa = spectral_abscissa(&a);
        if abscissa >= -1e-12 {
            return Err(Error::Instability(format!(
                "drift matrix is not Hurwitz (max Re eig = {abscissa:.3e}); the local-dissipator flow has no fixed point"
            )));
        }
        let a4 = DMatrix::from_iterator(4, 4, a.iter().copied());
        let d4 = DMatrix::from_iterator(4, 4, diff.iter().copied());
        let s = solve_lyapunov(&a4, &d4)?;
        Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)])
    };
    SingleModeState::new(nalgebra::Vector2::zeros(), sigma_a)
}
