use bimode_core::gaussian::{xlnx, TwoModeState};
use faer::{c64, Mat, Side};
use nalgebra::{Matrix4, Vector4};

use crate::basis::{Basis, Ladder};
use crate::{FockError, Result};

/// Density operator in the product number basis.
#[derive(Debug, Clone)]
pub enum DensityOperator {
    /// `Σ_k w_k |v_k⟩⟨v_k|` with real orthonormal columns `v_k`.
    Spectral { weights: Vec<f64>, vectors: Mat<f64> },
    /// Row-major `dim × dim` complex matrix.
    Dense { dim: usize, data: Vec<c64> },
}

impl DensityOperator {
    pub fn pure_real(psi: &[f64]) -> Self {
        let vectors = Mat::from_fn(psi.len(), 1, |i, _| psi[i]);
        Self::Spectral {
            weights: vec![1.0],
            vectors,
        }
    }

    pub fn pure(psi: &[c64]) -> Self {
        let dim = psi.len();
        let mut data = vec![c64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = psi[r] * psi[c].conj();
            }
        }
        Self::Dense { dim, data }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Spectral { vectors, .. } => vectors.nrows(),
            Self::Dense { dim, .. } => *dim,
        }
    }

    /// `⟨i|ρ|j⟩`.
    pub fn element(&self, i: usize, j: usize) -> c64 {
        match self {
            Self::Spectral { weights, vectors } => {
                let s: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * vectors[(i, k)] * vectors[(j, k)])
                    .sum();
                c64::new(s, 0.0)
            }
            Self::Dense { dim, data } => data[i * dim + j],
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        match self {
            Self::Spectral { weights, vectors } => (0..vectors.nrows())
                .map(|i| {
                    weights
                        .iter()
                        .enumerate()
                        .map(|(k, w)| w * vectors[(i, k)].powi(2))
                        .sum()
                })
                .collect(),
            Self::Dense { dim, data } => (0..*dim).map(|i| data[i * dim + i].re).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }

    /// Eigenvalues of `ρ`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        match self {
            Self::Spectral { weights, .. } => Ok(weights.clone()),
            Self::Dense { dim, data } => {
                let m = Mat::<c64>::from_fn(*dim, *dim, |r, c| data[r * dim + c]);
                m.self_adjoint_eigenvalues(Side::Lower)
                    .map_err(|e| FockError::Eigen(format!("{e:?}")))
            }
        }
    }

    /// Unit trace within 1e-10 and no eigenvalue below −1e-10.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(FockError::Config(format!("trace {tr} != 1")));
        }
        let min = self.spectrum()?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(FockError::Config(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(entropy_of(&self.spectrum()?))
    }

    /// `S(diag ρ) − S(ρ)`: relative entropy to the fully dephased state.
    pub fn dephased_coherence(&self) -> Result<f64> {
        Ok((entropy_of(&self.populations()) - self.entropy()?).max(0.0))
    }

    /// `min_ζ S(ρ‖ζ)` over product thermal states `ζ`; the minimiser has the
    /// mean occupations of `ρ`, giving `−S(ρ) − Σ_i ρ_ii ln ζ_ii`.
    pub fn thermal_reference_coherence(&self, basis: &Basis) -> Result<f64> {
        let pops = self.populations();
        let (mut na_mean, mut nb_mean) = (0.0, 0.0);
        for (i, p) in pops.iter().enumerate() {
            let (na, nb) = basis.occupations(i);
            na_mean += p * na as f64;
            nb_mean += p * nb as f64;
        }
        let ln_thermal = |n: f64, k: usize| -> f64 {
            let up = if k == 0 { 0.0 } else { k as f64 * n.ln() };
            up - (k as f64 + 1.0) * n.ln_1p()
        };
        let cross: f64 = pops
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| {
                let (na, nb) = basis.occupations(i);
                -p * (ln_thermal(na_mean, na) + ln_thermal(nb_mean, nb))
            })
            .sum();
        Ok((cross - self.entropy()?).max(0.0))
    }

    /// `Tr(ρ O)` for a product of ladder operators.
    pub fn expect(&self, basis: &Basis, ops: &[Ladder]) -> c64 {
        let mut acc = c64::new(0.0, 0.0);
        for c in 0..basis.dim() {
            if let Some((r, v)) = basis.apply_product(ops, c) {
                // Tr(ρO) = Σ_c ρ_{c r} O_{r c}
                acc += self.element(c, r) * v;
            }
        }
        acc
    }

    /// First and second moments in the dimensionless convention of the Gaussian code
    /// (`X = a + a†`, `P = i(a† − a)`, vacuum covariance = identity).
    pub fn gaussian_moments(&self, basis: &Basis) -> TwoModeState {
        use Ladder::*;
        let a = self.expect(basis, &[A]);
        let b = self.expect(basis, &[B]);
        let aa = self.expect(basis, &[A, A]);
        let bb = self.expect(basis, &[B, B]);
        let na = self.expect(basis, &[Ad, A]).re;
        let nb = self.expect(basis, &[Bd, B]).re;
        let ab = self.expect(basis, &[A, B]);
        let adb = self.expect(basis, &[Ad, B]);

        let d = Vector4::new(2.0 * a.re, 2.0 * a.im, 2.0 * b.re, 2.0 * b.im);
        let local = |sq: c64, n: f64| {
            [
                2.0 * sq.re + 2.0 * n + 1.0,
                2.0 * sq.im,
                -2.0 * sq.re + 2.0 * n + 1.0,
            ]
        };
        let [xx_a, xp_a, pp_a] = local(aa, na);
        let [xx_b, xp_b, pp_b] = local(bb, nb);
        let xaxb = 2.0 * (ab.re + adb.re);
        let xapb = 2.0 * (adb.im + ab.im);
        let paxb = 2.0 * (ab.im - adb.im);
        let papb = 2.0 * (adb.re - ab.re);
        let raw = Matrix4::new(
            xx_a, xp_a, xaxb, xapb, //
            xp_a, pp_a, paxb, papb, //
            xaxb, paxb, xx_b, xp_b, //
            xapb, papb, xp_b, pp_b,
        );
        TwoModeState {
            d,
            sigma: raw - d * d.transpose(),
        }
    }
}

/// `−Σ p ln p` of a probability vector, ignoring round-off negatives.
pub fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlnx(x.max(0.0))).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_moments() {
        let b = Basis::new(3);
        let mut psi = vec![0.0; b.dim()];
        psi[0] = 1.0;
        let rho = DensityOperator::pure_real(&psi);
        let m = rho.gaussian_moments(&b);
        assert!((m.sigma - Matrix4::identity()).abs().max() < 1e-15);
        assert_eq!(rho.thermal_reference_coherence(&b).unwrap(), 0.0);
        assert_eq!(rho.dephased_coherence().unwrap(), 0.0);
    }

    #[test]
    fn bell_superposition_has_ln2() {
        let b = Basis::new(3);
        let mut psi = vec![0.0; b.dim()];
        psi[b.index(0, 0)] = std::f64::consts::FRAC_1_SQRT_2;
        psi[b.index(1, 1)] = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityOperator::pure_real(&psi);
        assert!((rho.dephased_coherence().unwrap() - 2f64.ln()).abs() < 1e-14);
        let dense = DensityOperator::pure(&psi.iter().map(|&x| c64::new(x, 0.0)).collect::<Vec<_>>());
        assert!((dense.dephased_coherence().unwrap() - 2f64.ln()).abs() < 1e-12);
        dense.validate().unwrap();
    }

    #[test]
    fn diagonal_states_are_incoherent() {
        let b = Basis::new(3);
        let w: Vec<f64> = (0..b.dim()).map(|i| (i + 1) as f64).collect();
        let z: f64 = w.iter().sum();
        let rho = DensityOperator::Spectral {
            weights: w.iter().map(|x| x / z).collect(),
            vectors: Mat::identity(b.dim(), b.dim()),
        };
        assert!(rho.dephased_coherence().unwrap().abs() < 1e-14);
    }
}
