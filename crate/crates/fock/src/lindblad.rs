//! Lindblad and Schrödinger steppers for the truncated two-mode system, with the bath
//! acting locally on mode a: `ρ̇ = −i[H, ρ] + Γ(n̄+1)𝒟[a]ρ + Γn̄ 𝒟[a†]ρ`.

use bimode_core::coupled::{validate_params, ModelParams};
use bimode_core::dynamics::BathParams;
use faer::c64;

use crate::basis::{Basis, Ladder};
use crate::density::DensityOperator;
use crate::hamiltonian::hamiltonian_entries;
use crate::{FockError, Result};

/// Largest accepted step (units of 1/ω).
pub const MAX_DT: f64 = 1e-2;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Row-compressed real sparse matrix.
#[derive(Debug, Clone)]
struct Csr {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Csr {
    fn from_triplets(entries: &[(usize, usize, f64)], dim: usize) -> Self {
        let mut rows = vec![Vec::new(); dim];
        for &(r, c, v) in entries {
            rows[r].push((c, v));
        }
        Self { rows }
    }

    fn apply(&self, x: &[c64], out: &mut [c64]) {
        for (r, row) in self.rows.iter().enumerate() {
            out[r] = row.iter().map(|&(c, v)| x[c] * v).sum();
        }
    }
}

/// Coherent product state `|α_a⟩ ⊗ |α_b⟩`, truncated.
pub fn coherent_state(basis: &Basis, alpha_a: c64, alpha_b: c64) -> Vec<c64> {
    let amps = |alpha: c64| {
        let mut v = Vec::with_capacity(basis.levels());
        let mut c = c64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..basis.levels() {
            v.push(c);
            c = c * alpha / ((n + 1) as f64).sqrt();
        }
        v
    };
    let (ca, cb) = (amps(alpha_a), amps(alpha_b));
    (0..basis.dim())
        .map(|i| {
            let (na, nb) = basis.occupations(i);
            ca[na] * cb[nb]
        })
        .collect()
}

/// Complex amplitudes `α = (X + iP)/2` of a dimensionless displacement `(X_a, P_a, X_b, P_b)`.
pub fn amplitudes(d: &nalgebra::Vector4<f64>) -> (c64, c64) {
    (c64::new(d[0] / 2.0, d[1] / 2.0), c64::new(d[2] / 2.0, d[3] / 2.0))
}

/// Applies the displacement `exp(α_a a† − α_a* a) ⊗ exp(α_b b† − α_b* b)` to `psi`
/// by integrating the generator with RK4.
pub fn displace(basis: &Basis, psi: &[c64], alpha_a: c64, alpha_b: c64) -> Vec<c64> {
    let generator = |x: &[c64], out: &mut [c64]| {
        out.iter_mut().for_each(|o| *o = ZERO);
        for i in 0..basis.dim() {
            if x[i] == ZERO {
                continue;
            }
            for (op, coef) in [
                (Ladder::Ad, alpha_a),
                (Ladder::A, -alpha_a.conj()),
                (Ladder::Bd, alpha_b),
                (Ladder::B, -alpha_b.conj()),
            ] {
                if let Some((j, v)) = basis.apply(op, i) {
                    out[j] += coef * x[i] * v;
                }
            }
        }
    };
    let steps = 400;
    let h = 1.0 / steps as f64;
    let mut y = psi.to_vec();
    rk4_vector(&mut y, h, steps, generator);
    y
}

fn rk4_vector(y: &mut [c64], h: f64, steps: usize, mut f: impl FnMut(&[c64], &mut [c64])) {
    let n = y.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
    for _ in 0..steps {
        f(y, &mut k1);
        tmp.iter_mut().zip(y.iter()).zip(&k1).for_each(|((t, &a), &k)| *t = a + k * (0.5 * h));
        f(&tmp, &mut k2);
        tmp.iter_mut().zip(y.iter()).zip(&k2).for_each(|((t, &a), &k)| *t = a + k * (0.5 * h));
        f(&tmp, &mut k3);
        tmp.iter_mut().zip(y.iter()).zip(&k3).for_each(|((t, &a), &k)| *t = a + k * h);
        f(&tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

/// Pure-state evolution `ψ̇ = −iHψ` (RK4).
pub fn schrodinger_evolve(p: &ModelParams, basis: &Basis, psi: &[c64], t: f64, dt: f64) -> Result<Vec<c64>> {
    let p = validate_params(*p)?;
    check_dt(dt)?;
    let h = Csr::from_triplets(&hamiltonian_entries(&p, basis), basis.dim());
    let steps = (t / dt).round() as usize;
    let mut y = psi.to_vec();
    let mi = c64::new(0.0, -1.0);
    rk4_vector(&mut y, if steps == 0 { 0.0 } else { t / steps as f64 }, steps, |x, out| {
        h.apply(x, out);
        out.iter_mut().for_each(|o| *o *= mi);
    });
    Ok(y)
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(FockError::Config(format!("dt must lie in (0, {MAX_DT}], got {dt}")));
    }
    Ok(())
}

/// RK4 stepper for the master equation on a row-major density matrix.
#[derive(Debug, Clone)]
pub struct LindbladStepper {
    pub basis: Basis,
    pub dt: f64,
    h: Csr,
    /// `Γ(n̄ + 1)` and `Γn̄`.
    down: f64,
    up: f64,
    /// Verify positivity at every sample (one Hermitian eigendecomposition each).
    pub check_positivity: bool,
}

impl LindbladStepper {
    pub fn new(p: &ModelParams, bath: &BathParams, basis: Basis, dt: f64) -> Result<Self> {
        let p = validate_params(*p)?;
        check_dt(dt)?;
        let nbar = bath.n_bar(p.omega);
        Ok(Self {
            basis,
            dt,
            h: Csr::from_triplets(&hamiltonian_entries(&p, &basis), basis.dim()),
            down: bath.gamma * (nbar + 1.0),
            up: bath.gamma * nbar,
            check_positivity: true,
        })
    }

    fn rhs(&self, rho: &[c64], m: &mut [c64], out: &mut [c64]) {
        let dim = self.basis.dim();
        let levels = self.basis.levels();
        let top = self.basis.cutoff;
        // m = Hρ, row by row
        for (r, row) in self.h.rows.iter().enumerate() {
            let dst = &mut m[r * dim..(r + 1) * dim];
            dst.iter_mut().for_each(|x| *x = ZERO);
            for &(c, v) in row {
                let src = &rho[c * dim..(c + 1) * dim];
                dst.iter_mut().zip(src).for_each(|(d, &s)| *d += s * v);
            }
        }
        let na: Vec<usize> = (0..dim).map(|i| i / levels).collect();
        let sq: Vec<f64> = (0..=top + 1).map(|n| (n as f64).sqrt()).collect();
        for r in 0..dim {
            let nr = na[r];
            for s in 0..dim {
                let ns = na[s];
                // −i[H, ρ] = −i(Hρ − (Hρ)†) for Hermitian ρ
                let comm = m[r * dim + s] - m[s * dim + r].conj();
                let mut v = c64::new(comm.im, -comm.re);
                let x = rho[r * dim + s];
                // 𝒟[a]: aρa† − ½{a†a, ρ}
                let mut d = -0.5 * (nr + ns) as f64 * x;
                if nr < top && ns < top {
                    d += rho[(r + levels) * dim + s + levels] * (sq[nr + 1] * sq[ns + 1]);
                }
                v += d * self.down;
                if self.up != 0.0 {
                    // 𝒟[a†]: a†ρa − ½{aa†, ρ}, with aa† vanishing on the top level
                    let aad = |n: usize| if n < top { (n + 1) as f64 } else { 0.0 };
                    let mut u = -0.5 * (aad(nr) + aad(ns)) * x;
                    if nr > 0 && ns > 0 {
                        u += rho[(r - levels) * dim + s - levels] * (sq[nr] * sq[ns]);
                    }
                    v += u * self.up;
                }
                out[r * dim + s] = v;
            }
        }
    }

    /// Integrates for `steps` steps, calling `sample(t, ρ)` at `t = 0` and after every
    /// `stride` steps.
    pub fn run(
        &self,
        rho0: &DensityOperator,
        steps: usize,
        stride: usize,
        mut sample: impl FnMut(f64, &DensityOperator) -> Result<()>,
    ) -> Result<DensityOperator> {
        let dim = self.basis.dim();
        let mut y: Vec<c64> = (0..dim * dim).map(|k| rho0.element(k / dim, k % dim)).collect();
        let n = y.len();
        let mut m = vec![ZERO; n];
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
            (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
        let h = self.dt;
        let trace = |y: &[c64]| (0..dim).map(|i| y[i * dim + i].re).sum::<f64>();
        let mut state = DensityOperator::Dense { dim, data: y.clone() };
        sample(0.0, &state)?;
        let mut tr = trace(&y);
        for step in 1..=steps {
            self.rhs(&y, &mut m, &mut k1);
            tmp.iter_mut().zip(&y).zip(&k1).for_each(|((t, &a), &k)| *t = a + k * (0.5 * h));
            self.rhs(&tmp, &mut m, &mut k2);
            tmp.iter_mut().zip(&y).zip(&k2).for_each(|((t, &a), &k)| *t = a + k * (0.5 * h));
            self.rhs(&tmp, &mut m, &mut k3);
            tmp.iter_mut().zip(&y).zip(&k3).for_each(|((t, &a), &k)| *t = a + k * h);
            self.rhs(&tmp, &mut m, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            let time = step as f64 * h;
            let new_tr = trace(&y);
            if (new_tr - tr).abs() > 1e-10 || !new_tr.is_finite() {
                return Err(FockError::Step {
                    time,
                    reason: format!("trace drifted by {:.3e} in one step", new_tr - tr),
                    suggested_dt: h / 2.0,
                });
            }
            tr = new_tr;
            if step % stride.max(1) == 0 || step == steps {
                state = DensityOperator::Dense { dim, data: y.clone() };
                if self.check_positivity {
                    let min = state.spectrum()?.into_iter().fold(f64::INFINITY, f64::min);
                    if min < -1e-8 {
                        return Err(FockError::Step {
                            time,
                            reason: format!("density matrix eigenvalue {min:.3e} < 0"),
                            suggested_dt: h / 2.0,
                        });
                    }
                }
                sample(time, &state)?;
            }
        }
        Ok(state)
    }
}
