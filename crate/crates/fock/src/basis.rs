use crate::{FockError, Result};

/// Truncation of the product number basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    /// Largest occupation kept per mode; the space has `(cutoff + 1)²` states.
    pub cutoff: usize,
    /// Population allowed in the top two levels of either mode.
    pub leakage_tol: f64,
}

impl FockConfig {
    pub const STATICS_CUTOFF: usize = 40;
    pub const DYNAMICS_CUTOFF: usize = 30;
    pub const LEAKAGE_TOL: f64 = 1e-6;

    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(FockError::Config(format!("cutoff must be >= 2, got {cutoff}")));
        }
        Ok(Self {
            cutoff,
            leakage_tol: Self::LEAKAGE_TOL,
        })
    }

    pub fn statics() -> Self {
        Self::new(Self::STATICS_CUTOFF).expect("valid")
    }

    pub fn dynamics() -> Self {
        Self::new(Self::DYNAMICS_CUTOFF).expect("valid")
    }

    pub fn basis(&self) -> Basis {
        Basis::new(self.cutoff)
    }
}

/// Total-number parity, conserved by both couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    A,
    Ad,
    B,
    Bd,
}

/// `|n_a, n_b⟩ ↦ n_a (cutoff + 1) + n_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub cutoff: usize,
}

impl Basis {
    pub fn new(cutoff: usize) -> Self {
        Self { cutoff }
    }

    pub fn levels(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.levels() * self.levels()
    }

    pub fn index(&self, na: usize, nb: usize) -> usize {
        na * self.levels() + nb
    }

    pub fn occupations(&self, i: usize) -> (usize, usize) {
        (i / self.levels(), i % self.levels())
    }

    pub fn sector(&self, parity: Parity) -> Vec<usize> {
        let want = matches!(parity, Parity::Odd) as usize;
        (0..self.dim())
            .filter(|&i| {
                let (na, nb) = self.occupations(i);
                (na + nb) % 2 == want
            })
            .collect()
    }

    /// One ladder operator on a basis state, truncated at the cutoff.
    pub fn apply(&self, op: Ladder, i: usize) -> Option<(usize, f64)> {
        let (na, nb) = self.occupations(i);
        let top = self.cutoff;
        match op {
            Ladder::A if na > 0 => Some((self.index(na - 1, nb), (na as f64).sqrt())),
            Ladder::Ad if na < top => Some((self.index(na + 1, nb), ((na + 1) as f64).sqrt())),
            Ladder::B if nb > 0 => Some((self.index(na, nb - 1), (nb as f64).sqrt())),
            Ladder::Bd if nb < top => Some((self.index(na, nb + 1), ((nb + 1) as f64).sqrt())),
            _ => None,
        }
    }

    /// Product `ops[0] ops[1] …` on a basis state (rightmost acts first).
    pub fn apply_product(&self, ops: &[Ladder], i: usize) -> Option<(usize, f64)> {
        ops.iter().rev().try_fold((i, 1.0), |(j, c), &op| {
            self.apply(op, j).map(|(k, v)| (k, c * v))
        })
    }

    /// Population in the top two levels of either mode.
    pub fn leakage(&self, populations: &[f64]) -> f64 {
        let edge = self.cutoff - 1;
        populations
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let (na, nb) = self.occupations(*i);
                na >= edge || nb >= edge
            })
            .map(|(_, p)| p.max(0.0))
            .sum()
    }
}
