//! Closed-form joint law of `(V_{ε₁}, V_{ε₂})` in one dimension.
//!
//! `V_{ε₂}` is Laplace with rate `ε₂` and the increment `Z = V_{ε₁} − V_{ε₂}`
//! is independent of it, with law
//! `φ(z) = (ε₁/ε₂)² [δ(z) + ((ε₂² − ε₁²)/(2ε₁)) e^{−ε₁|z|}]`.
//! The joint density is `g(x, y) = ε₂ C₁ φ(x − y) e^{−ε₂|y|}` with `C₁ = 1/2`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelJoint {
    eps1: f64,
    eps2: f64,
}

impl TwoLevelJoint {
    /// Requires `0 < ε₁ ≤ ε₂ < √2 ε₁`, the regime where the two-level
    /// construction is stated.
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        if !(eps1 > 0.0) || !eps2.is_finite() || !(eps1 <= eps2) {
            return Err(Error::param(format!("need 0 < eps1 <= eps2, got ({eps1}, {eps2})")));
        }
        if !(eps2 < std::f64::consts::SQRT_2 * eps1) {
            return Err(Error::param(format!(
                "eps2 = {eps2} is outside the two-level regime eps2 < sqrt(2)·eps1 = {}",
                std::f64::consts::SQRT_2 * eps1
            )));
        }
        Ok(Self { eps1, eps2 })
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    /// Probability that the two levels agree (`P(Z = 0)`).
    pub fn atom_weight(&self) -> f64 {
        (self.eps1 / self.eps2).powi(2)
    }

    /// Absolutely continuous part of `φ` at `z`.
    pub fn increment_density(&self, z: f64) -> f64 {
        let (e1, e2) = (self.eps1, self.eps2);
        self.atom_weight() * (e2 * e2 - e1 * e1) / (2.0 * e1) * (-e1 * z.abs()).exp()
    }

    /// Continuous part of `g(x, y)`, with `x = V_{ε₁}` and `y = V_{ε₂}`.
    pub fn joint_density(&self, x: f64, y: f64) -> f64 {
        self.increment_density(x - y) * self.upper_marginal(y)
    }

    /// Density along the diagonal `x = y` carried by the atom of `φ`.
    pub fn diagonal_density(&self, y: f64) -> f64 {
        self.atom_weight() * self.upper_marginal(y)
    }

    /// Laplace density of `V_{ε₂}`.
    pub fn upper_marginal(&self, y: f64) -> f64 {
        0.5 * self.eps2 * (-self.eps2 * y.abs()).exp()
    }

    /// Laplace density of `V_{ε₁}`.
    pub fn lower_marginal(&self, x: f64) -> f64 {
        0.5 * self.eps1 * (-self.eps1 * x.abs()).exp()
    }
}
