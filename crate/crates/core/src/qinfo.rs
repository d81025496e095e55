//! Correlation measures of two-qubit X-states. Entropies are in bits.

use alloc::format;
use alloc::vec::Vec;
use libm::{cos, log2, sin, sqrt};
use num_complex::Complex64;

use crate::correlators::XState;
use crate::{Error, Result};

use core::f64::consts::PI;

/// Below this marginal entropy the state is treated as exactly product.
const PURE_MARGINAL: f64 = 1e-14;
/// Discord this negative is attributed to rounding and clamped to zero.
const DISCORD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelationTriple {
    pub concurrence: f64,
    pub discord: f64,
    pub classical: f64,
}

impl CorrelationTriple {
    pub const ZERO: Self = Self { concurrence: 0.0, discord: 0.0, classical: 0.0 };
}

/// Rank-1 projective measurement on site 2, given by the Bloch direction of
/// `Π₀ = |u⟩⟨u|` with `|u⟩ = cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// The two orthonormal vectors `|u⟩, |u⊥⟩`.
    pub fn vectors(&self) -> [[Complex64; 2]; 2] {
        let (c, s) = (cos(self.theta / 2.0), sin(self.theta / 2.0));
        let e = Complex64::from_polar(1.0, self.phi);
        [
            [Complex64::new(c, 0.0), e * s],
            [-e.conj() * s, Complex64::new(c, 0.0)],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub q: f64,
    /// Normalized state of site 1 after the outcome; the zero matrix when `q = 0`.
    pub rho1_post: [[Complex64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Coarse grid over `θ ∈ [0, π]`, endpoints included.
    pub theta_points: usize,
    /// Coarse grid over `φ ∈ [0, π)`. The other half is the same measurement
    /// with the outcomes relabelled.
    pub phi_points: usize,
    /// Number of best grid points refined by Nelder-Mead.
    pub starts: usize,
    /// Simplex stops when its objective values spread by less than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { theta_points: 64, phi_points: 32, starts: 3, tol: 1e-12, max_iter: 2000 }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.theta_points < 2 {
            return Err(Error::invalid("theta_points", "must be at least 2"));
        }
        if self.phi_points < 1 || self.starts < 1 {
            return Err(Error::invalid("phi_points", "grid and start counts must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be positive"));
        }
        Ok(())
    }
}

/// `-p log₂ p` with `0 log 0 = 0`.
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * log2(p)
    } else {
        0.0
    }
}

/// X-state concurrence `2 max(0, |ρ₂₃| - √(ρ₁₁ρ₄₄), |ρ₁₄| - √(ρ₂₂ρ₃₃))`.
pub fn concurrence(x: &XState) -> f64 {
    let a = x.r23.norm() - sqrt(x.r11 * x.r44);
    let b = x.r14.norm() - sqrt(x.r22 * x.r33);
    2.0 * a.max(b).max(0.0)
}

/// Shannon/von Neumann entropy of a spectrum.
pub fn entropy(spectrum: &[f64]) -> Result<f64> {
    if let Some(p) = spectrum.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("entry {p} is negative or NaN")));
    }
    let total: f64 = spectrum.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(spectrum.iter().map(|&p| plogp(p)).sum())
}

/// Eigenvalues of the two 2×2 blocks, clipped at zero.
pub fn spectrum(x: &XState) -> [f64; 4] {
    let block = |a: f64, b: f64, c: Complex64| {
        let mid = 0.5 * (a + b);
        let r = sqrt(0.25 * (a - b) * (a - b) + c.norm_sqr());
        [(mid + r).max(0.0), (mid - r).max(0.0)]
    };
    let [e1, e2] = block(x.r11, x.r44, x.r14);
    let [e3, e4] = block(x.r22, x.r33, x.r23);
    [e1, e2, e3, e4]
}

/// Diagonal of `ρ₁ = tr₂ ρ`.
pub fn marginal_first(x: &XState) -> [f64; 2] {
    [x.r11 + x.r22, x.r33 + x.r44]
}

/// Diagonal of `ρ₂ = tr₁ ρ`.
pub fn marginal_second(x: &XState) -> [f64; 2] {
    [x.r11 + x.r33, x.r22 + x.r44]
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    p.iter().map(|&v| plogp(v)).sum()
}

/// `I = S(ρ₁) + S(ρ₂) - S(ρ₁₂)`.
pub fn mutual_information(x: &XState) -> f64 {
    let i = entropy_unchecked(&marginal_first(x)) + entropy_unchecked(&marginal_second(x)) - entropy_unchecked(&spectrum(x));
    i.max(0.0)
}

/// Measure site 2 in `basis`. General route through the dense matrix.
pub fn measure(x: &XState, basis: &MeasurementBasis) -> [MeasurementOutcome; 2] {
    let m = x.to_matrix();
    basis.vectors().map(|u| {
        // (ρ₁)_{ab} = Σ_{cd} conj(u_c) ρ_{(a,c),(b,d)} u_d
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (a, row) in r.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                for c in 0..2 {
                    for d in 0..2 {
                        *entry += u[c].conj() * m[2 * a + c][2 * b + d] * u[d];
                    }
                }
            }
        }
        let q = (r[0][0] + r[1][1]).re.max(0.0);
        if q > 0.0 {
            for e in r.iter_mut().flatten() {
                *e /= q;
            }
        } else {
            r = [[Complex64::new(0.0, 0.0); 2]; 2];
        }
        MeasurementOutcome { q, rho1_post: r }
    })
}

/// Objective `S(ρ₁) - Σⱼ qⱼ S(ρ₁ʲ)` for the measurement at `(θ, φ)`.
///
/// For an X-state the unnormalized post-measurement blocks are
/// `[[A, z], [z*, B]]` and `[[A', -z], [-z*, B']]` with
/// `A = ρ₁₁c² + ρ₂₂s²`, `B = ρ₃₃c² + ρ₄₄s²`, `A' = ρ₁₁s² + ρ₂₂c²`,
/// `B' = ρ₃₃s² + ρ₄₄c²` and `z = cs(e^{iφ}ρ₁₄ + e^{-iφ}ρ₂₃)`, where
/// `c = cos θ/2`, `s = sin θ/2`.
pub fn measured_information(x: &XState, s1: f64, theta: f64, phi: f64) -> f64 {
    let (c, s) = (cos(theta / 2.0), sin(theta / 2.0));
    let (c2, s2) = (c * c, s * s);
    let e = Complex64::from_polar(1.0, phi);
    let z = (e * x.r14 + e.conj() * x.r23) * (c * s);
    let z2 = z.norm_sqr();
    // q S(ρ/q) = Σ -μ log μ + q log q for the two eigenvalues μ of the block.
    let outcome = |a: f64, b: f64| {
        let q = a + b;
        if q <= 0.0 {
            return 0.0;
        }
        let r = sqrt((a - b) * (a - b) + 4.0 * z2);
        plogp(0.5 * (q + r)) + plogp((0.5 * (q - r)).max(0.0)) - plogp(q)
    };
    s1 - outcome(x.r11 * c2 + x.r22 * s2, x.r33 * c2 + x.r44 * s2) - outcome(x.r11 * s2 + x.r22 * c2, x.r33 * s2 + x.r44 * c2)
}

/// Classical correlation `C = max_Π [S(ρ₁) - Σⱼ qⱼ S(ρ₁ʲ)]` over rank-1
/// projective measurements on site 2, with an optimal basis.
pub fn classical_correlation(x: &XState, opt: &OptimizerSettings) -> Result<(f64, MeasurementBasis)> {
    opt.validate()?;
    let s1 = entropy_unchecked(&marginal_first(x));
    if s1 < PURE_MARGINAL {
        return Ok((0.0, MeasurementBasis::default()));
    }
    let f = |v: [f64; 2]| measured_information(x, s1, v[0], v[1]);

    let mut grid = Vec::with_capacity(opt.theta_points * opt.phi_points);
    for i in 0..opt.theta_points {
        let theta = PI * i as f64 / (opt.theta_points - 1) as f64;
        for j in 0..opt.phi_points {
            let phi = PI * j as f64 / opt.phi_points as f64;
            grid.push((f([theta, phi]), [theta, phi]));
        }
    }
    // Descending by value, ties by position, so the result is reproducible.
    grid.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1[0].total_cmp(&b.1[0])).then(a.1[1].total_cmp(&b.1[1])));

    let step = [PI / (opt.theta_points - 1) as f64, PI / opt.phi_points as f64];
    let mut best = (grid[0].0, grid[0].1);
    for &(_, start) in grid.iter().take(opt.starts) {
        let (v, at) = nelder_mead_max(&f, start, step, opt.tol, opt.max_iter).ok_or_else(|| {
            Error::OptimizerFailure(format!(
                "simplex from (theta={}, phi={}) did not reach tolerance {} in {} iterations",
                start[0], start[1], opt.tol, opt.max_iter
            ))
        })?;
        if v > best.0 {
            best = (v, at);
        }
    }
    let basis = MeasurementBasis { theta: best.1[0], phi: best.1[1] };
    Ok((best.0.max(0.0), basis))
}

/// Maximize a function of two variables. Returns `None` when the simplex
/// has not converged after `max_iter` iterations.
fn nelder_mead_max(f: &impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2], tol: f64, max_iter: usize) -> Option<(f64, [f64; 2])> {
    let mut pts = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = pts.map(f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..max_iter {
        // Order best (largest) first.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        if vals[0] - vals[2] <= tol {
            return Some((vals[0], pts[0]));
        }
        let centroid = lerp(pts[0], pts[1], 0.5);
        let reflected = lerp(pts[2], centroid, 2.0);
        let fr = f(reflected);
        if fr > vals[0] {
            let expanded = lerp(pts[2], centroid, 3.0);
            let fe = f(expanded);
            if fe > fr {
                (pts[2], vals[2]) = (expanded, fe);
            } else {
                (pts[2], vals[2]) = (reflected, fr);
            }
        } else if fr > vals[1] {
            (pts[2], vals[2]) = (reflected, fr);
        } else {
            let (contracted, fc) = if fr > vals[2] {
                let p = lerp(pts[2], centroid, 1.5);
                (p, f(p))
            } else {
                let p = lerp(pts[2], centroid, 0.5);
                (p, f(p))
            };
            if fc > vals[2].max(fr) {
                (pts[2], vals[2]) = (contracted, fc);
            } else {
                for i in 1..3 {
                    pts[i] = lerp(pts[0], pts[i], 0.5);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    None
}

/// Quantum discord `D = I - C`.
pub fn discord(x: &XState, opt: &OptimizerSettings) -> Result<f64> {
    let (c, _) = classical_correlation(x, opt)?;
    discord_from(mutual_information(x), c)
}

fn discord_from(mutual: f64, classical: f64) -> Result<f64> {
    let d = mutual - classical;
    if d < -DISCORD_SLACK {
        return Err(Error::OptimizerFailure(format!(
            "classical correlation {classical} exceeds mutual information {mutual}"
        )));
    }
    Ok(d.max(0.0))
}

/// Concurrence, discord and classical correlation with one optimization.
pub fn correlation_triple(x: &XState, opt: &OptimizerSettings) -> Result<CorrelationTriple> {
    let (classical, _) = classical_correlation(x, opt)?;
    let discord = discord_from(mutual_information(x), classical)?;
    Ok(CorrelationTriple { concurrence: concurrence(x), discord, classical })
}
