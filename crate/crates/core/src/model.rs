//! Free-fermion solution of the XY chain after the quench.
//!
//! The post-quench Hamiltonian is
//! `H = -λ Σ [(1+γ) S^x_i S^x_{i+1} + (1-γ) S^y_i S^y_{i+1}] - Σ S^z_i`
//! with spin-1/2 operators. After Jordan-Wigner, Fourier and Bogoliubov
//! transformations every momentum pair `(k, -k)` evolves independently with
//! quasiparticle energy `Λ_k`.

use libm::{cos, sin, sqrt};
use num_complex::Complex64;

use crate::{Error, Result};

/// Below this energy the Bogoliubov quotients are 0/0 and their directional
/// limits are used instead. Only reached at `λ = 1, k = ±π`.
pub const GAP_CUTOFF: f64 = 1e-12;

/// Coupling `λ` the chain is quenched to, and the exchange anisotropy `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::invalid("lambda", "must be finite and non-negative"));
        }
        if !gamma.is_finite() || !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", "must lie in [0, 1]"));
        }
        Ok(Self { lambda, gamma })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `γ = 0`: pairing vanishes and the polarized state is stationary.
    pub fn is_xx(&self) -> bool {
        self.gamma == 0.0
    }

    /// Upper bound on `Λ_k` over the Brillouin zone, `1 + λ` for `γ ≤ 1`.
    pub fn max_energy(&self) -> f64 {
        1.0 + self.lambda
    }
}

/// Single-mode data at momentum `k`.
///
/// Besides `α_k` and `β_k` themselves this carries the two products every
/// integrand actually uses, evaluated in closed forms that stay finite where
/// the quotient definitions are 0/0:
/// `α_k β_k = γλ sin k / (2Λ_k)` and `β_k² = (Λ_k + 1 + λ cos k) / (2Λ_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    pub k: f64,
    pub energy: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_beta: f64,
    pub beta_sq: f64,
}

/// Heisenberg-picture coefficients of one momentum mode at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEvolution {
    pub c: Complex64,
    pub d: f64,
}

/// Quasiparticle energy `Λ_k = sqrt((1 + λ cos k)² + λ²γ² sin²k)`.
pub fn dispersion(params: &ModelParams, k: f64) -> f64 {
    let (s, c) = (sin(k), cos(k));
    let eps = 1.0 + params.lambda * c;
    let delta = params.lambda * params.gamma * s;
    sqrt(eps * eps + delta * delta)
}

/// Bogoliubov coefficients `(α_k, β_k)`.
///
/// `α_k ≥ 0` and `β_k` carries the sign of `γλ sin k` (positive when that
/// product is zero). `α² + β² = 1` everywhere, including the removable
/// singularities.
pub fn bogoliubov(params: &ModelParams, k: f64) -> (f64, f64) {
    let m = mode(params, k);
    (m.alpha, m.beta)
}

pub fn mode(params: &ModelParams, k: f64) -> ModeData {
    let (s, c) = (sin(k), cos(k));
    let eps = 1.0 + params.lambda * c;
    let delta = params.lambda * params.gamma * s;
    let energy = sqrt(eps * eps + delta * delta);

    let (beta_sq, alpha_beta) = if energy < GAP_CUTOFF {
        // Only λ = 1, k = ±π. Approaching along k, ε/Λ → 0 when γ > 0 and
        // ε/Λ → 1 on the XX line.
        if params.gamma > 0.0 {
            (0.5, if s < 0.0 { -0.5 } else { 0.5 })
        } else {
            (1.0, 0.0)
        }
    } else {
        ((energy + eps) / (2.0 * energy), delta / (2.0 * energy))
    };
    let beta_sq = beta_sq.clamp(0.0, 1.0);
    let alpha = sqrt(1.0 - beta_sq);
    let beta = if delta < 0.0 { -sqrt(beta_sq) } else { sqrt(beta_sq) };

    ModeData { k, energy, alpha, beta, alpha_beta, beta_sq }
}

/// `c_k(t) = e^{iΛt} - 2iβ² sin Λt` and `d_k(t) = αβ sin Λt`.
pub fn mode_coeffs(params: &ModelParams, k: f64, t: f64) -> ModeEvolution {
    evolve(&mode(params, k), t)
}

pub fn evolve(m: &ModeData, t: f64) -> ModeEvolution {
    let phase = m.energy * t;
    let (s, c) = (sin(phase), cos(phase));
    ModeEvolution {
        c: Complex64::new(c, s * (1.0 - 2.0 * m.beta_sq)),
        d: m.alpha_beta * s,
    }
}
