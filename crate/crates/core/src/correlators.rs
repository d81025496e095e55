//! Thermodynamic-limit fermion contractions and two-site reduced density
//! matrices, starting from the fully polarized state.
//!
//! Spin up at site `j` is an occupied Jordan-Wigner fermion `b_j`. All
//! two-point functions needed for sites (1,2) and (1,3) are closed over five
//! stored values using equal-time anticommutation, conjugation and
//! translation invariance:
//!
//! | stored | meaning        |
//! |--------|----------------|
//! | `n`    | `⟨b₁†b₁⟩`      |
//! | `h1`   | `⟨b₁†b₂⟩`      |
//! | `a1`   | `⟨b₁b₂⟩`       |
//! | `h2`   | `⟨b₁†b₃⟩`      |
//! | `a2`   | `⟨b₁b₃⟩`       |
//!
//! so that `⟨b₁b₂†⟩ = -h1` and `⟨b₁†b₂†⟩ = -conj(a1)`.

use alloc::format;
use libm::{cos, sin, sqrt};
use num_complex::Complex64;

use crate::model::{self, ModelParams};
use crate::quadrature::{integrate_halfline_even, Bundle, QuadratureSpec};
use crate::Result;
use crate::Error;

/// Populations this far below zero are treated as an upstream bug.
const CLAMP_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    /// Sites 1 and 2.
    Nearest,
    /// Sites 1 and 3, with the Jordan-Wigner string through site 2.
    NextNearest,
}

/// How the next-nearest coherences are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Full Wick expansion of the string correlators.
    #[default]
    WickDerived,
    /// The published closed form, kept for comparison. Its `ρ₂₃` carries a
    /// term linear in the hopping where Wick's theorem gives a square.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionSet {
    pub n: f64,
    pub h1: f64,
    pub a1: Complex64,
    pub h2: f64,
    pub a2: Complex64,
}

impl ContractionSet {
    /// Contractions of the fully polarized product state.
    pub const INITIAL: Self = Self {
        n: 1.0,
        h1: 0.0,
        a1: Complex64 { re: 0.0, im: 0.0 },
        h2: 0.0,
        a2: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.n - other.n).abs(),
            (self.h1 - other.h1).abs(),
            (self.a1 - other.a1).norm(),
            (self.h2 - other.h2).abs(),
            (self.a2 - other.a2).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Evaluate the five contraction integrals at time `t`.
///
/// With `B_k = 1 - 4α²β² sin²Λt` and
/// `P_k = αβ (2 sin²Λt (1 - 2β²) - i sin 2Λt)`:
/// `n = ⟨B⟩`, `h_m = ⟨cos(mk) B⟩`, `a_m = ⟨sin(mk) P⟩`, where `⟨·⟩` is the
/// Brillouin-zone average. All five integrands are even in `k`.
pub fn contractions(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<ContractionSet> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "must be finite and non-negative"));
    }
    if t == 0.0 || params.is_xx() || params.lambda() == 0.0 {
        // The integrands reduce to their static values.
        return Ok(ContractionSet::INITIAL);
    }

    let spec = spec.with_oscillation_hint(t * params.max_energy());
    let integrand = |k: f64| {
        let m = model::mode(params, k);
        let phase = m.energy * t;
        let (s, c) = (sin(phase), cos(phase));
        let ab = m.alpha_beta;
        let bracket = 1.0 - 4.0 * ab * ab * s * s;
        let pair_re = ab * 2.0 * s * s * (1.0 - 2.0 * m.beta_sq);
        let pair_im = -ab * 2.0 * s * c;
        let (s1, c1) = (sin(k), cos(k));
        let (s2, c2) = (2.0 * s1 * c1, c1 * c1 - s1 * s1);
        Bundle([bracket, c1 * bracket, c2 * bracket, s1 * pair_re, s1 * pair_im, s2 * pair_re, s2 * pair_im])
    };
    let r = integrate_halfline_even(integrand, &spec)
        .map_err(|e| e.at("contraction integrals (n, h1, a1, h2, a2)", params.lambda(), params.gamma(), t))?;
    let [n, h1, h2, a1r, a1i, a2r, a2i] = r.value.0;
    Ok(ContractionSet {
        n,
        h1,
        a1: Complex64::new(a1r, a1i),
        h2,
        a2: Complex64::new(a2r, a2i),
    })
}

/// Two-qubit density matrix with nonzero entries only on the diagonal and
/// anti-diagonal, in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub r11: f64,
    pub r22: f64,
    pub r33: f64,
    pub r44: f64,
    /// `⟨↑↑|ρ|↓↓⟩`
    pub r14: Complex64,
    /// `⟨↑↓|ρ|↓↑⟩`
    pub r23: Complex64,
}

impl XState {
    /// `|↑↑⟩⟨↑↑|`.
    pub const POLARIZED: Self = Self {
        r11: 1.0,
        r22: 0.0,
        r33: 0.0,
        r44: 0.0,
        r14: Complex64 { re: 0.0, im: 0.0 },
        r23: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn diagonal(r11: f64, r22: f64, r33: f64, r44: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self { r11, r22, r33, r44, r14: zero, r23: zero }
    }

    pub fn trace(&self) -> f64 {
        self.r11 + self.r22 + self.r33 + self.r44
    }

    /// Check the density-matrix conditions and absorb rounding-level
    /// violations: populations slightly below zero are set to zero and
    /// coherences slightly outside the positivity minors are scaled back onto
    /// them. Anything larger than `1e-6` is an error.
    pub fn validated(mut self) -> Result<Self> {
        let all = [self.r11, self.r22, self.r33, self.r44, self.r14.re, self.r14.im, self.r23.re, self.r23.im];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite entry in {self:?}")));
        }
        if (self.trace() - 1.0).abs() > CLAMP_LIMIT {
            return Err(Error::InvalidState(format!("trace {} differs from 1", self.trace())));
        }
        for p in [&mut self.r11, &mut self.r22, &mut self.r33, &mut self.r44] {
            if *p < -CLAMP_LIMIT {
                return Err(Error::InvalidState(format!("negative population {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let bound14 = sqrt(self.r11 * self.r44);
        let bound23 = sqrt(self.r22 * self.r33);
        for (c, bound, name) in [(&mut self.r14, bound14, "r14"), (&mut self.r23, bound23, "r23")] {
            let m = c.norm();
            if m > bound {
                if m - bound > CLAMP_LIMIT {
                    return Err(Error::InvalidState(format!("|{name}| = {m} exceeds positivity bound {bound}")));
                }
                *c = if m > 0.0 { *c * (bound / m) } else { *c };
            }
        }
        Ok(self)
    }

    /// Dense 4×4 matrix, row-major.
    pub fn to_matrix(&self) -> [[Complex64; 4]; 4] {
        let z = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        [
            [re(self.r11), z, z, self.r14],
            [z, re(self.r22), self.r23, z],
            [z, self.r23.conj(), re(self.r33), z],
            [self.r14.conj(), z, z, re(self.r44)],
        ]
    }

    /// Largest entrywise distance between the two dense matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.r11 - other.r11).abs(),
            (self.r22 - other.r22).abs(),
            (self.r33 - other.r33).abs(),
            (self.r44 - other.r44).abs(),
            (self.r14 - other.r14).norm(),
            (self.r23 - other.r23).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Populations of sites (1, j) from the density `n` and the (1, j) hopping
/// and pairing contractions, via `⟨n₁n_j⟩ = n² + |a|² - h²`.
fn populations(n: f64, h: f64, a: Complex64) -> (f64, f64, f64) {
    let r11 = n * n + a.norm_sqr() - h * h;
    let r22 = n - r11;
    let r44 = 1.0 - r11 - 2.0 * r22;
    (r11, r22, r44)
}

/// Sites (1,2): `ρ₁₄ = ⟨b₁†b₂†⟩ = -conj(a1)`, `ρ₂₃ = -⟨b₁b₂†⟩ = h1`.
/// Not yet validated.
pub fn assemble_nn(cs: &ContractionSet) -> XState {
    let (r11, r22, r44) = populations(cs.n, cs.h1, cs.a1);
    XState {
        r11,
        r22,
        r33: r22,
        r44,
        r14: -cs.a1.conj(),
        r23: Complex64::new(cs.h1, 0.0),
    }
}

/// Sites (1,3). Both coherences pick up the string `1 - 2n₂`:
///
/// - `ρ₂₃ = -⟨b₁(1-2n₂)b₃†⟩ = h2(1-2n) + 2h1² + 2|a1|²`
/// - `ρ₁₄ = conj(-⟨b₁(1-2n₂)b₃⟩) = -conj(a2(1-2n) + 4 h1 a1)`
///
/// The printed variant replaces `2h1²` by `-2h1` in `ρ₂₃`; its `ρ₁₄` agrees
/// with the Wick expansion. Not yet validated.
pub fn assemble_nnn(cs: &ContractionSet, variant: Variant) -> XState {
    let (r11, r22, r44) = populations(cs.n, cs.h2, cs.a2);
    let string = 1.0 - 2.0 * cs.n;
    let r23 = match variant {
        Variant::WickDerived => cs.h2 * string + 2.0 * cs.h1 * cs.h1 + 2.0 * cs.a1.norm_sqr(),
        Variant::AsPrinted => cs.h2 * string - 2.0 * cs.h1 + 2.0 * cs.a1.norm_sqr(),
    };
    let r14 = -(cs.a2 * string + cs.a1 * (4.0 * cs.h1)).conj();
    XState { r11, r22, r33: r22, r44, r14, r23: Complex64::new(r23, 0.0) }
}

pub fn assemble(cs: &ContractionSet, pair: Pair, variant: Variant) -> XState {
    match pair {
        Pair::Nearest => assemble_nn(cs),
        Pair::NextNearest => assemble_nnn(cs, variant),
    }
}

pub fn rho_nn(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<XState> {
    rho(params, Pair::Nearest, Variant::WickDerived, t, spec)
}

pub fn rho_nnn(params: &ModelParams, t: f64, spec: &QuadratureSpec, variant: Variant) -> Result<XState> {
    rho(params, Pair::NextNearest, variant, t, spec)
}

pub fn rho(params: &ModelParams, pair: Pair, variant: Variant, t: f64, spec: &QuadratureSpec) -> Result<XState> {
    let cs = contractions(params, t, spec)?;
    assemble(&cs, pair, variant)
        .validated()
        .map_err(|e| e.at("density matrix assembly", params.lambda(), params.gamma(), t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lambda: f64, gamma: f64) -> ModelParams {
        ModelParams::new(lambda, gamma).unwrap()
    }

    #[test]
    fn static_limits_are_exact() {
        let spec = QuadratureSpec::default();
        assert_eq!(contractions(&p(0.7, 0.4), 0.0, &spec).unwrap(), ContractionSet::INITIAL);
        assert_eq!(contractions(&p(1.3, 0.0), 7.3, &spec).unwrap(), ContractionSet::INITIAL);
        for pair in [Pair::Nearest, Pair::NextNearest] {
            for variant in [Variant::WickDerived, Variant::AsPrinted] {
                assert_eq!(rho(&p(0.5, 1.0), pair, variant, 0.0, &spec).unwrap(), XState::POLARIZED);
                assert_eq!(rho(&p(0.5, 0.0), pair, variant, 3.0, &spec).unwrap(), XState::POLARIZED);
            }
        }
    }

    #[test]
    fn contraction_bounds() {
        let spec = QuadratureSpec::default();
        for &(l, g, t) in &[(0.5, 1.0, 1.0), (1.0, 1.0, 12.0), (1.8, 0.3, 4.0)] {
            let cs = contractions(&p(l, g), t, &spec).unwrap();
            assert!((0.0..=1.0).contains(&cs.n));
            assert!(cs.h1.abs() <= 1.0 && cs.h2.abs() <= 1.0);
        }
    }

    #[test]
    fn states_are_physical() {
        let spec = QuadratureSpec::default();
        for &(l, g, t) in &[(0.5, 1.0, 1.0), (1.2, 1.0, 2.0), (0.9, 0.8, 25.0), (2.0, 0.1, 13.0)] {
            for pair in [Pair::Nearest, Pair::NextNearest] {
                let x = rho(&p(l, g), pair, Variant::WickDerived, t, &spec).unwrap();
                assert!((x.trace() - 1.0).abs() < 1e-9);
                assert_eq!(x.r22, x.r33);
                assert!(x.r14.norm_sqr() <= x.r11 * x.r44 + 1e-9);
                assert!(x.r23.norm_sqr() <= x.r22 * x.r33 + 1e-9);
            }
        }
    }

    #[test]
    fn validation_clamps_and_rejects() {
        let x = XState::diagonal(1.0 + 1e-11, 0.0, 0.0, -1e-11).validated().unwrap();
        assert_eq!(x.r44, 0.0);
        assert!(XState::diagonal(1.1, 0.0, 0.0, -0.1).validated().is_err());
        let mut y = XState::diagonal(0.5, 0.0, 0.0, 0.5);
        y.r14 = Complex64::new(0.5 + 1e-9, 0.0);
        assert_eq!(y.validated().unwrap().r14.re, 0.5);
        y.r14 = Complex64::new(0.6, 0.0);
        assert!(matches!(y.validated(), Err(Error::InvalidState(_))));
    }

    #[test]
    fn variants_differ_only_in_r23() {
        let cs = ContractionSet {
            n: 0.8,
            h1: 0.1,
            a1: Complex64::new(0.05, -0.2),
            h2: -0.03,
            a2: Complex64::new(0.01, 0.07),
        };
        let w = assemble_nnn(&cs, Variant::WickDerived);
        let a = assemble_nnn(&cs, Variant::AsPrinted);
        assert_eq!(w.r14, a.r14);
        assert_eq!((w.r11, w.r22, w.r44), (a.r11, a.r22, a.r44));
        assert!(((w.r23 - a.r23).re - 2.0 * (0.01 + 0.1)).abs() < 1e-15);
    }
}
