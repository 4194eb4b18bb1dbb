//! Single-mode density matrices, used to check the Gaussian fidelity formula.

use faer::{Mat, Side};

use crate::{FockError, Result};

/// Thermal state with mean occupation `n`, truncated and renormalised.
pub fn thermal(n: f64, cutoff: usize) -> Mat<f64> {
    let q = n / (n + 1.0);
    let mut m = Mat::<f64>::zeros(cutoff + 1, cutoff + 1);
    let mut w = 1.0 / (n + 1.0);
    for k in 0..=cutoff {
        m[(k, k)] = w;
        w *= q;
    }
    let z: f64 = (0..=cutoff).map(|k| m[(k, k)]).sum();
    m / z
}

/// `|α⟩⟨α|` for real `α`.
pub fn coherent(alpha: f64, cutoff: usize) -> Mat<f64> {
    let mut v = vec![0.0; cutoff + 1];
    let mut c = (-0.5 * alpha * alpha).exp();
    for (k, slot) in v.iter_mut().enumerate() {
        *slot = c;
        c *= alpha / ((k + 1) as f64).sqrt();
    }
    Mat::from_fn(cutoff + 1, cutoff + 1, |i, j| v[i] * v[j])
}

fn sqrt_psd(m: &Mat<f64>) -> Result<Mat<f64>> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| FockError::Eigen(format!("{e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = m.nrows();
    let root = Mat::from_fn(n, n, |i, j| if i == j { s[i].max(0.0).sqrt() } else { 0.0 });
    Ok(u * root * u.transpose())
}

/// Uhlmann fidelity `(Tr √(√ρ₁ ρ₂ √ρ₁))²` of real symmetric density matrices.
pub fn fidelity(rho1: &Mat<f64>, rho2: &Mat<f64>) -> Result<f64> {
    let r = sqrt_psd(rho1)?;
    let inner = &r * rho2 * &r;
    let inner = Mat::from_fn(inner.nrows(), inner.ncols(), |i, j| 0.5 * (inner[(i, j)] + inner[(j, i)]));
    let ev = inner
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| FockError::Eigen(format!("{e:?}")))?;
    let tr: f64 = ev.iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}
