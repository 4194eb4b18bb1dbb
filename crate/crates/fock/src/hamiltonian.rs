use bimode_core::coupled::{diagonalize, validate_params, ModelParams};
use faer::Mat;

use crate::basis::{Basis, FockConfig, Ladder, Parity};
use crate::Result;

/// Sparse real symmetric matrix as `(row, col, value)` triplets, both triangles.
pub type Triplets = Vec<(usize, usize, f64)>;

/// `ω(a†a + b†b) + λ(a†b + ab†) + μ(a†b† + ab)` in the truncated basis.
pub fn hamiltonian_entries(p: &ModelParams, basis: &Basis) -> Triplets {
    let ModelParams { omega, lambda, mu } = *p;
    let mut out = Vec::with_capacity(5 * basis.dim());
    for i in 0..basis.dim() {
        let (na, nb) = basis.occupations(i);
        out.push((i, i, omega * (na + nb) as f64));
        // upper-triangle partners; the adjoint terms are added by symmetry
        for (ops, g) in [([Ladder::Ad, Ladder::B], lambda), ([Ladder::Ad, Ladder::Bd], mu)] {
            if g == 0.0 {
                continue;
            }
            if let Some((j, c)) = basis.apply_product(&ops, i) {
                out.push((j, i, g * c));
                out.push((i, j, g * c));
            }
        }
    }
    out
}

pub fn build_hamiltonian(p: &ModelParams, cfg: &FockConfig) -> Result<Mat<f64>> {
    let p = validate_params(*p)?;
    let basis = cfg.basis();
    Ok(dense(&hamiltonian_entries(&p, &basis), basis.dim()))
}

pub fn dense(entries: &Triplets, dim: usize) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(dim, dim);
    for &(r, c, v) in entries {
        m[(r, c)] += v;
    }
    m
}

/// Restriction of a parity-conserving operator to one sector.
pub fn sector_matrix(entries: &Triplets, basis: &Basis, parity: Parity) -> (Vec<usize>, Mat<f64>) {
    let idx = basis.sector(parity);
    let mut pos = vec![usize::MAX; basis.dim()];
    for (k, &i) in idx.iter().enumerate() {
        pos[i] = k;
    }
    let mut m = Mat::<f64>::zeros(idx.len(), idx.len());
    for &(r, c, v) in entries {
        let (pr, pc) = (pos[r], pos[c]);
        if pr != usize::MAX && pc != usize::MAX {
            m[(pr, pc)] += v;
        }
    }
    (idx, m)
}

/// `Λ₊α†α + Λ₋β†β` with `α ∝ (a + b), (a† + b†)` and `β ∝ (a − b), (a† − b†)`.
///
/// `α` and `β` raise occupations by one, so they are applied into a basis two levels
/// larger and the products projected back. That makes every entry the exact
/// projection of `α†α` (resp. `β†β`), without edge artefacts from truncated products.
pub fn normal_mode_generator(p: &ModelParams, basis: &Basis) -> Result<Triplets> {
    let d = diagonalize(p)?;
    let ops = d.operators();
    let big = Basis::new(basis.cutoff + 2);
    // column i of α (resp. β) as sparse entries in the enlarged basis
    let column = |i: usize, (pc, qc): (f64, f64), sign: f64| -> Vec<(usize, f64)> {
        let (na, nb) = basis.occupations(i);
        let j = big.index(na, nb);
        let mut v = Vec::with_capacity(4);
        for (op, coef) in [
            (Ladder::A, pc),
            (Ladder::B, sign * pc),
            (Ladder::Ad, qc),
            (Ladder::Bd, sign * qc),
        ] {
            if let Some((k, c)) = big.apply(op, j) {
                v.push((k, coef * c));
            }
        }
        v
    };
    let mut out = Triplets::new();
    for (freq, coeffs, sign) in [(d.lambda_plus, ops.alpha, 1.0), (d.lambda_minus, ops.beta, -1.0)] {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); big.dim()];
        for i in 0..basis.dim() {
            for (k, c) in column(i, coeffs, sign) {
                rows[k].push((i, c));
            }
        }
        for row in &rows {
            for &(m, cm) in row {
                for &(n, cn) in row {
                    out.push((m, n, freq * cm * cn));
                }
            }
        }
    }
    Ok(out)
}
