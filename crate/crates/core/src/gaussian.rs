//! Covariance-matrix algebra for one- and two-mode Gaussian states.
//!
//! Quadratures are dimensionless, `X = a + a†` and `P = i(a† − a)`, so the vacuum
//! has covariance equal to the identity and a pure state has unit symplectic
//! eigenvalues. Ordering is `(X_a, P_a, X_b, P_b)`.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues below `1 - PHYSICALITY_TOL` are rejected.
pub const PHYSICALITY_TOL: f64 = 1e-6;
/// Coherence values in `(-COHERENCE_CLAMP, 0)` are reported as zero.
pub const COHERENCE_CLAMP: f64 = 1e-10;

/// `x ln x` with `0 ln 0 = 0`.
pub fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy of a thermal state with mean occupation `n`:
/// `(n + 1) ln(n + 1) − n ln n`, evaluated without cancellation for large `n`.
pub fn thermal_entropy(n: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        n.ln_1p() + n * (1.0 / n).ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleModeState {
    pub d: Vector2<f64>,
    pub sigma: Matrix2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeState {
    pub d: Vector4<f64>,
    pub sigma: Matrix4<f64>,
}

/// Symplectic eigenvalues, one per mode, sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticSpectrum(Vec<f64>);

impl SymplecticSpectrum {
    /// Builds a spectrum from raw values, rejecting anything below `1 − PHYSICALITY_TOL`.
    /// Values in `[1 − tol, 1)` are snapped to 1.
    pub fn new(mut nu: Vec<f64>) -> Result<Self> {
        for v in nu.iter_mut() {
            if !v.is_finite() || *v < 1.0 - PHYSICALITY_TOL {
                return Err(Error::Unphysical(format!("symplectic eigenvalue {v} < 1")));
            }
            if *v < 1.0 {
                *v = 1.0;
            }
        }
        nu.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(nu))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_symmetric(sigma: &DMatrix<f64>) -> Result<()> {
    let n = sigma.nrows();
    if n != sigma.ncols() || n == 0 || n % 2 != 0 || n > 4 {
        return Err(Error::Dimension(format!(
            "covariance must be 2x2 or 4x4, got {}x{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Dimension(format!(
                    "covariance not symmetric at ({i},{j}): {} vs {}",
                    sigma[(i, j)],
                    sigma[(j, i)]
                )));
            }
        }
    }
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("covariance contains non-finite entries".into()));
    }
    Ok(())
}

/// Block-diagonal symplectic form `⊕ [[0, 1], [−1, 0]]` for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a 2×2 or 4×4 covariance matrix.
///
/// General route: with `S = σ^{1/2}`, the matrix `M = S Ω S` is antisymmetric and
/// `−M² = MᵀM` has each `ν_j²` as a doubly degenerate eigenvalue (the moduli of the
/// spectrum of `iΩσ`).
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    check_symmetric(sigma)?;
    let n = sigma.nrows();
    let modes = n / 2;
    if modes == 1 {
        let det = sigma[(0, 0)] * sigma[(1, 1)] - sigma[(0, 1)] * sigma[(1, 0)];
        if det <= 0.0 || sigma[(0, 0)] + sigma[(1, 1)] <= 0.0 {
            return Err(Error::Unphysical(format!("single-mode covariance has det {det}")));
        }
        return SymplecticSpectrum::new(vec![det.sqrt()]);
    }
    let eig = sigma.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| e <= 0.0) {
        return Err(Error::Unphysical(
            "covariance is not positive definite".into(),
        ));
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let m = &root * symplectic_form(modes) * &root;
    let k = m.transpose() * &m;
    let k = (&k + k.transpose()) * 0.5;
    let mut squares: Vec<f64> = k.symmetric_eigen().eigenvalues.iter().copied().collect();
    squares.sort_by(|a, b| b.total_cmp(a));
    let nu = squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect();
    SymplecticSpectrum::new(nu)
}

/// Closed-form two-mode symplectic eigenvalues,
/// `ν² = (Δ ± √(Δ² − 4 det σ)) / 2` with `Δ = det A + det B + 2 det C`
/// for `σ = [[A, C], [Cᵀ, B]]`.
pub fn symplectic_eigenvalues_closed_form(sigma: &Matrix4<f64>) -> Result<SymplecticSpectrum> {
    let det = sigma.determinant();
    if det <= 0.0 {
        return Err(Error::Unphysical(format!("covariance determinant {det} <= 0")));
    }
    let (plus, minus) = symplectic_pair_unchecked(sigma);
    SymplecticSpectrum::new(vec![plus, minus])
}

/// The closed-form pair `(ν₊, ν₋)` without any physicality check; NaN-free for any
/// real input.
pub fn symplectic_pair_unchecked(sigma: &Matrix4<f64>) -> (f64, f64) {
    let a = sigma.fixed_view::<2, 2>(0, 0).determinant();
    let b = sigma.fixed_view::<2, 2>(2, 2).determinant();
    let c = sigma.fixed_view::<2, 2>(0, 2).determinant();
    let delta = a + b + 2.0 * c;
    let det = sigma.determinant();
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    (
        (0.5 * (delta + disc)).max(0.0).sqrt(),
        (0.5 * (delta - disc)).max(0.0).sqrt(),
    )
}

/// Von Neumann entropy in nats, `Σ_j g((ν_j − 1)/2)` with `g` the thermal entropy.
pub fn von_neumann_entropy(spectrum: &SymplecticSpectrum) -> Result<f64> {
    spectrum.values().iter().try_fold(0.0, |acc, &nu| {
        if nu < 1.0 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!("symplectic eigenvalue {nu} < 1")));
        }
        Ok(acc + thermal_entropy(0.5 * (nu - 1.0).max(0.0)))
    })
}

/// Average excitation number of the thermal state sharing this mode's energy.
pub fn mean_excitation(state: &SingleModeState) -> Result<f64> {
    let s = &state.sigma;
    let e = 0.25 * (s[(0, 0)] + s[(1, 1)] + state.d.norm_squared() - 2.0);
    if e < -1e-9 {
        return Err(Error::Unphysical(format!("mean excitation {e} < 0")));
    }
    Ok(e.max(0.0))
}

/// Common view of single- and two-mode states for the coherence measure.
pub trait GaussianState {
    fn covariance(&self) -> DMatrix<f64>;
    /// Per-mode reduced states, in mode order.
    fn reduced_modes(&self) -> Vec<SingleModeState>;

    fn spectrum(&self) -> Result<SymplecticSpectrum> {
        symplectic_eigenvalues(&self.covariance())
    }
}

/// Relative entropy of coherence with respect to the closest product of thermal
/// states: `C = −S(ρ) + Σ_j g(ε̄_j)`.
pub fn coherence<S: GaussianState + ?Sized>(state: &S) -> Result<f64> {
    let entropy = von_neumann_entropy(&state.spectrum()?)?;
    let reference = state
        .reduced_modes()
        .iter()
        .try_fold(0.0, |acc, m| mean_excitation(m).map(|e| acc + thermal_entropy(e)))?;
    clamp_coherence(reference - entropy)
}

fn clamp_coherence(c: f64) -> Result<f64> {
    if c < -COHERENCE_CLAMP {
        Err(Error::Unphysical(format!("negative coherence {c}")))
    } else {
        Ok(c.max(0.0))
    }
}

/// Two-mode coherence written out term by term with the closed-form symplectic
/// eigenvalues. Independent of the generic eigenvalue route used by [`coherence`].
pub fn coherence_closed_form(state: &TwoModeState) -> Result<f64> {
    let nu = symplectic_eigenvalues_closed_form(&state.sigma)?;
    let mut c = 0.0;
    for &v in nu.values() {
        c += xlnx(0.5 * (v - 1.0)) - xlnx(0.5 * (v + 1.0));
    }
    for m in state.reduced_modes() {
        let e = mean_excitation(&m)?;
        c += xlnx(e + 1.0) - xlnx(e);
    }
    clamp_coherence(c)
}

/// Uhlmann fidelity of two single-mode Gaussian states.
pub fn gaussian_fidelity(s1: &SingleModeState, s2: &SingleModeState) -> Result<f64> {
    let sum = s1.sigma + s2.sigma;
    let big_delta = sum.determinant();
    let inv = sum
        .try_inverse()
        .filter(|_| big_delta > 1e-300)
        .ok_or_else(|| Error::Degenerate("sigma1 + sigma2 is singular".into()))?;
    let big_lambda =
        ((s1.sigma.determinant() - 1.0).max(0.0)) * ((s2.sigma.determinant() - 1.0).max(0.0));
    let delta = s1.d - s2.d;
    let exponent = -0.5 * (delta.transpose() * inv * delta)[(0, 0)];
    let f = 2.0 * exponent.exp() / ((big_delta + big_lambda).sqrt() - big_lambda.sqrt());
    Ok(f.clamp(0.0, 1.0))
}

/// Wigner density of a two-mode Gaussian in dimensionless quadratures, normalised so
/// that `∫ W dX_a dP_a dX_b dP_b = 1`.
pub fn wigner_density(state: &TwoModeState, point: &Vector4<f64>) -> Result<f64> {
    let inv = state
        .sigma
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("covariance is singular".into()))?;
    let delta = point - state.d;
    let q = (delta.transpose() * inv * delta)[(0, 0)];
    let norm = (2.0 * std::f64::consts::PI).powi(2) * state.sigma.determinant().sqrt();
    Ok((-0.5 * q).exp() / norm)
}

impl SingleModeState {
    pub fn new(d: Vector2<f64>, sigma: Matrix2<f64>) -> Result<Self> {
        let state = Self { d, sigma };
        check_symmetric(&state.covariance())?;
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("displacement contains non-finite entries".into()));
        }
        symplectic_eigenvalues(&state.covariance())?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self {
            d: Vector2::zeros(),
            sigma: Matrix2::identity(),
        }
    }

    /// Thermal state with mean occupation `n`, covariance `(2n + 1) I`.
    pub fn thermal(n: f64) -> Self {
        Self {
            d: Vector2::zeros(),
            sigma: Matrix2::identity() * (2.0 * n + 1.0),
        }
    }

    pub fn displaced(mut self, d: Vector2<f64>) -> Self {
        self.d = d;
        self
    }
}

impl TwoModeState {
    pub fn new(d: Vector4<f64>, sigma: Matrix4<f64>) -> Result<Self> {
        let state = Self { d, sigma };
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("displacement contains non-finite entries".into()));
        }
        symplectic_eigenvalues(&state.covariance())?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self {
            d: Vector4::zeros(),
            sigma: Matrix4::identity(),
        }
    }

    pub fn product(a: &SingleModeState, b: &SingleModeState) -> Self {
        let mut sigma = Matrix4::zeros();
        sigma.fixed_view_mut::<2, 2>(0, 0).copy_from(&a.sigma);
        sigma.fixed_view_mut::<2, 2>(2, 2).copy_from(&b.sigma);
        Self {
            d: Vector4::new(a.d[0], a.d[1], b.d[0], b.d[1]),
            sigma,
        }
    }

    pub fn mode_a(&self) -> SingleModeState {
        SingleModeState {
            d: self.d.fixed_rows::<2>(0).into(),
            sigma: self.sigma.fixed_view::<2, 2>(0, 0).into(),
        }
    }

    pub fn mode_b(&self) -> SingleModeState {
        SingleModeState {
            d: self.d.fixed_rows::<2>(2).into(),
            sigma: self.sigma.fixed_view::<2, 2>(2, 2).into(),
        }
    }

    /// Exchanges the roles of modes a and b.
    pub fn swapped(&self) -> Self {
        let perm = nalgebra::Matrix4::new(
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0,
        );
        Self {
            d: perm * self.d,
            sigma: perm * self.sigma * perm.transpose(),
        }
    }

    /// Largest magnitude among entries that mix an X quadrature with a P quadrature.
    pub fn xp_mixing(&self) -> f64 {
        [(0, 1), (0, 3), (2, 1), (2, 3)]
            .iter()
            .map(|&(i, j)| self.sigma[(i, j)].abs())
            .fold(0.0, f64::max)
    }
}

/// Reduced state of mode a.
pub fn partial_trace_mode_a(state: &TwoModeState) -> SingleModeState {
    state.mode_a()
}

impl GaussianState for SingleModeState {
    fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_iterator(2, 2, self.sigma.iter().copied())
    }

    fn reduced_modes(&self) -> Vec<SingleModeState> {
        vec![*self]
    }
}

impl GaussianState for TwoModeState {
    fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_iterator(4, 4, self.sigma.iter().copied())
    }

    fn reduced_modes(&self) -> Vec<SingleModeState> {
        vec![self.mode_a(), self.mode_b()]
    }
}
