//! Gauss–Hermite rules (weight `e^{−x²}`) via the Golub–Welsch eigenproblem.

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (eig.eigenvalues[i], sqrt_pi * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    /// `∫ f(x) e^{−x²/(2s²)} dx` for a Gaussian envelope of standard deviation `s`.
    pub fn integrate_scaled(&self, s: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let k = s * std::f64::consts::SQRT_2;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(k * x))
            .sum::<f64>()
            * k
    }
}
