use bimode_core::coupled::{normal_mode_frequencies, validate_params, ModelParams};
use bimode_core::thermal::Temperature;
use faer::{Mat, Side};

use crate::basis::{Basis, FockConfig, Parity};
use crate::density::DensityOperator;
use crate::hamiltonian::{hamiltonian_entries, normal_mode_generator, sector_matrix, Triplets};
use crate::{FockError, Result};

/// An oracle state together with its truncation diagnostic.
#[derive(Debug, Clone)]
pub struct OracleState {
    pub rho: DensityOperator,
    pub basis: Basis,
    /// Population in the top two levels of either mode.
    pub leakage: f64,
    /// Ground energy, for pure ground states.
    pub energy: Option<f64>,
}

impl OracleState {
    fn checked(rho: DensityOperator, basis: Basis, cfg: &FockConfig, energy: Option<f64>) -> Result<Self> {
        let leakage = basis.leakage(&rho.populations());
        if leakage >= cfg.leakage_tol {
            return Err(FockError::Truncation {
                leakage,
                tol: cfg.leakage_tol,
            });
        }
        Ok(Self {
            rho,
            basis,
            leakage,
            energy,
        })
    }
}

struct SectorEigen {
    indices: Vec<usize>,
    values: Vec<f64>,
    vectors: Mat<f64>,
}

fn sector_eigen(entries: &Triplets, basis: &Basis, parity: Parity) -> Result<SectorEigen> {
    let (indices, m) = sector_matrix(entries, basis, parity);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| FockError::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..indices.len()).map(|k| s[k]).collect();
    Ok(SectorEigen {
        indices,
        values,
        vectors: evd.U().to_owned(),
    })
}

/// Lowest eigenvector of the truncated Hamiltonian. It lives in the even sector,
/// adiabatically connected to `|0, 0⟩`.
pub fn ground_state_fock(p: &ModelParams, cfg: &FockConfig) -> Result<OracleState> {
    let p = validate_params(*p)?;
    let basis = cfg.basis();
    let eig = sector_eigen(&hamiltonian_entries(&p, &basis), &basis, Parity::Even)?;
    let k = (0..eig.values.len())
        .min_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b]))
        .expect("non-empty sector");
    let mut psi = vec![0.0; basis.dim()];
    for (row, &i) in eig.indices.iter().enumerate() {
        psi[i] = eig.vectors[(row, k)];
    }
    OracleState::checked(DensityOperator::pure_real(&psi), basis, cfg, Some(eig.values[k]))
}

/// Weights below this fraction of the largest one are dropped from the spectral form.
const WEIGHT_FLOOR: f64 = 1e-18;

/// `exp(−(Λ₊α†α + Λ₋β†β)/T)/Z` with `α`, `β` built from their expansion in `a`, `b`.
pub fn steady_state_fock(p: &ModelParams, t: Temperature, cfg: &FockConfig) -> Result<OracleState> {
    let p = validate_params(*p)?;
    if t.value() == 0.0 {
        return ground_state_fock(&p, cfg);
    }
    let (lp, lm) = normal_mode_frequencies(&p);
    let hot = t.occupation(lp.min(lm));
    if hot > cfg.cutoff as f64 / 10.0 {
        return Err(FockError::Config(format!(
            "thermal occupation {hot:.3} exceeds cutoff/10 = {}; raise the cutoff",
            cfg.cutoff as f64 / 10.0
        )));
    }
    let basis = cfg.basis();
    let k = normal_mode_generator(&p, &basis)?;
    let sectors = [
        sector_eigen(&k, &basis, Parity::Even)?,
        sector_eigen(&k, &basis, Parity::Odd)?,
    ];
    let e_min = sectors
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let mut kept: Vec<(f64, usize, usize)> = Vec::new();
    for (si, s) in sectors.iter().enumerate() {
        for (k, &e) in s.values.iter().enumerate() {
            let w = (-(e - e_min) / t.value()).exp();
            if w > WEIGHT_FLOOR {
                kept.push((w, si, k));
            }
        }
    }
    let z: f64 = kept.iter().map(|x| x.0).sum();
    let mut vectors = Mat::<f64>::zeros(basis.dim(), kept.len());
    for (col, &(_, si, k)) in kept.iter().enumerate() {
        let s = &sectors[si];
        for (row, &i) in s.indices.iter().enumerate() {
            vectors[(i, col)] = s.vectors[(row, k)];
        }
    }
    let weights = kept.iter().map(|x| x.0 / z).collect();
    OracleState::checked(DensityOperator::Spectral { weights, vectors }, basis, cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bimode_core::coupled::diagonalize;

    #[test]
    fn uncoupled_ground_state_is_vacuum() {
        let cfg = FockConfig::new(6).unwrap();
        let g = ground_state_fock(&ModelParams::new(1.0, 0.0, 0.0).unwrap(), &cfg).unwrap();
        assert!((g.rho.populations()[0] - 1.0).abs() < 1e-14);
        assert!(g.energy.unwrap().abs() < 1e-14);
    }

    #[test]
    fn ground_energy_matches_normal_mode_constant() {
        let p = ModelParams::new(1.0, 0.0, 0.5).unwrap();
        let g = ground_state_fock(&p, &FockConfig::new(40).unwrap()).unwrap();
        let want = diagonalize(&p).unwrap().ground_energy();
        assert!((want - (0.75f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((g.energy.unwrap() - want).abs() < 1e-6, "{} vs {want}", g.energy.unwrap());
    }

    #[test]
    fn exchange_alone_leaves_vacuum_untouched() {
        let cfg = FockConfig::new(10).unwrap();
        let g = ground_state_fock(&ModelParams::new(1.0, 0.3, 0.0).unwrap(), &cfg).unwrap();
        assert!(g.rho.dephased_coherence().unwrap().abs() < 1e-10);
        assert!(g.rho.thermal_reference_coherence(&g.basis).unwrap().abs() < 1e-10);
    }

    #[test]
    fn truncation_is_reported() {
        let cfg = FockConfig::new(4).unwrap();
        let r = ground_state_fock(&ModelParams::new(1.0, 0.0, 0.9).unwrap(), &cfg);
        assert!(matches!(r, Err(FockError::Truncation { .. })));
    }

    #[test]
    fn cold_limit_is_ground_state() {
        let p = ModelParams::new(1.0, 0.2, 0.3).unwrap();
        let cfg = FockConfig::new(16).unwrap();
        let basis = cfg.basis();
        let g = ground_state_fock(&p, &cfg).unwrap().rho.gaussian_moments(&basis);
        let s = steady_state_fock(&p, Temperature::new(0.02).unwrap(), &cfg)
            .unwrap()
            .rho
            .gaussian_moments(&basis);
        assert!((g.sigma - s.sigma).abs().max() < 1e-6);
    }

    #[test]
    fn uncoupled_thermal_is_gibbs_product() {
        let cfg = FockConfig::new(20).unwrap();
        let t = Temperature::new(0.5).unwrap();
        let st = steady_state_fock(&ModelParams::new(1.0, 0.0, 0.0).unwrap(), t, &cfg).unwrap();
        let pops = st.rho.populations();
        let q = (-2.0f64).exp();
        for (i, p) in pops.iter().enumerate() {
            let (na, nb) = st.basis.occupations(i);
            let want = (1.0 - q).powi(2) * q.powi((na + nb) as i32);
            assert!((p - want).abs() < 1e-12);
        }
    }
}
