//! Midpoint rule on the periodic interval `[-π, π]`.
//!
//! For smooth periodic integrands the equally spaced rule converges
//! spectrally. Nodes sit at panel midpoints, so `k = 0` and `k = ±π` are
//! never sampled. Convergence is judged by doubling the panel count until
//! two successive results agree.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use libm::ceil;
use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_panels: usize,
    pub max_panels: usize,
    /// Rough number of radians the integrand's phase sweeps across the zone,
    /// `t · max_k Λ_k` for the contraction integrals.
    pub oscillation_hint: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            min_panels: 4096,
            max_panels: 1 << 22,
            oscillation_hint: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if self.min_panels < 2 {
            return Err(Error::invalid("min_panels", "must be at least 2"));
        }
        if self.max_panels < self.min_panels {
            return Err(Error::invalid("max_panels", "must be at least min_panels"));
        }
        if !(self.oscillation_hint >= 0.0) || !self.oscillation_hint.is_finite() {
            return Err(Error::invalid("oscillation_hint", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn with_oscillation_hint(self, oscillation_hint: f64) -> Self {
        Self { oscillation_hint, ..self }
    }

    /// First panel count tried: enough to put ~64 nodes on every radian of
    /// phase swept by the integrand. Rounded up to even so the half-line rule
    /// can mirror it.
    pub fn initial_panels(&self) -> usize {
        let by_phase = 64.0 * ceil(1.0 + self.oscillation_hint);
        let n = if by_phase >= self.max_panels as f64 {
            self.max_panels
        } else {
            self.min_panels.max(by_phase as usize)
        };
        n + (n & 1)
    }
}

/// Values that can be integrated: reals, complex numbers and fixed-size
/// bundles of reals evaluated together.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Max-norm, used for convergence checks.
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// A bundle of real integrals sharing one integrand evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bundle<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for Bundle<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        self
    }
}

impl<const N: usize> Sub for Bundle<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        self
    }
}

impl<const N: usize> Mul<f64> for Bundle<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl<const N: usize> Integrand for Bundle<N> {
    fn zero() -> Self {
        Bundle([0.0; N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    /// `(1/2π) ∫_{-π}^{π} f(k) dk`.
    pub value: T,
    pub err_estimate: f64,
    /// Full-line panel count of the accepted rule.
    pub panels_used: usize,
}

/// Compensated running sum, so results do not depend on panel count
/// through accumulated rounding.
struct Accumulator<T> {
    sum: T,
    comp: T,
    abs_sum: f64,
}

impl<T: Integrand> Accumulator<T> {
    fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero(), abs_sum: 0.0 }
    }

    fn push(&mut self, x: T) {
        let y = x - self.comp;
        let s = self.sum + y;
        self.comp = (s - self.sum) - y;
        self.sum = s;
        self.abs_sum += x.magnitude();
    }
}

/// Mean of `f` over `nodes` equally spaced midpoints of `[lo, lo + width]`,
/// plus the mean magnitude (for the rounding floor).
fn midpoint_mean<T: Integrand>(f: &mut impl FnMut(f64) -> T, lo: f64, width: f64, nodes: usize) -> (T, f64) {
    let h = width / nodes as f64;
    let mut acc = Accumulator::new();
    for j in 0..nodes {
        acc.push(f(lo + (j as f64 + 0.5) * h));
    }
    let inv = 1.0 / nodes as f64;
    (acc.sum * inv, acc.abs_sum * inv)
}

/// Panel-doubling driver shared by both entry points. `rule(n)` returns the
/// n-panel estimate and the mean integrand magnitude.
fn refine<T: Integrand>(spec: &QuadratureSpec, mut rule: impl FnMut(usize) -> (T, f64)) -> Result<QuadratureResult<T>> {
    spec.validate()?;
    let mut panels = spec.initial_panels();
    let (mut coarse, _) = rule(panels);
    loop {
        if panels * 2 > spec.max_panels {
            // Nothing finer is allowed; report the last observed change.
            let (prev, _) = rule(panels / 2);
            return Err(Error::NoConvergence {
                panels,
                discrepancy: (coarse - prev).magnitude(),
            });
        }
        let (fine, mean_abs) = rule(panels * 2);
        let change = (fine - coarse).magnitude();
        let tol = spec.abs_tol.max(spec.rel_tol * fine.magnitude());
        if change <= tol {
            let rounding = 16.0 * f64::EPSILON * mean_abs;
            return Ok(QuadratureResult {
                value: fine,
                err_estimate: change + rounding,
                panels_used: panels * 2,
            });
        }
        coarse = fine;
        panels *= 2;
    }
}

/// `(1/2π) ∫_{-π}^{π} f(k) dk` for a bounded periodic `f`.
pub fn integrate_periodic<T: Integrand>(mut f: impl FnMut(f64) -> T, spec: &QuadratureSpec) -> Result<QuadratureResult<T>> {
    refine(spec, |n| midpoint_mean(&mut f, -PI, 2.0 * PI, n))
}

/// Same integral for even `f`, sampling only `[0, π]`. The nodes are exactly
/// the non-negative half of the full-line rule with the same panel count.
pub fn integrate_halfline_even<T: Integrand>(mut f: impl FnMut(f64) -> T, spec: &QuadratureSpec) -> Result<QuadratureResult<T>> {
    refine(spec, |n| midpoint_mean(&mut f, 0.0, PI, n / 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{cos, fabs, sin};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn trivial_integrals() {
        let r = integrate_periodic(|_| 1.0, &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let r = integrate_periodic(cos, &spec()).unwrap();
        assert!(r.value.abs() < 1e-15);
        let r = integrate_periodic(|k| cos(k) * cos(k), &spec()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn halfline_integrals() {
        let r = integrate_halfline_even(|k| cos(2.0 * k), &spec()).unwrap();
        assert!(r.value.abs() < 1e-15);
        let r = integrate_halfline_even(|k| fabs(sin(k)), &spec()).unwrap();
        assert!((r.value - 2.0 / PI).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate_periodic(|k| Complex64::new(cos(k) * cos(k), sin(k) * sin(k) * 2.0), &spec()).unwrap();
        assert!((r.value - Complex64::new(0.5, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn reports_no_convergence() {
        let s = QuadratureSpec { min_panels: 8, max_panels: 64, ..spec() };
        // |sin k| has a kink: algebraic convergence only.
        let err = integrate_periodic(|k| fabs(sin(k)), &s).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { panels: 64, .. }), "{err:?}");
    }

    #[test]
    fn panel_count_follows_oscillation_hint() {
        let s = spec();
        assert_eq!(s.initial_panels(), 4096);
        assert_eq!(s.with_oscillation_hint(100.0).initial_panels(), 64 * 101);
        let r = integrate_periodic(|k| cos(80.0 * cos(k)), &s.with_oscillation_hint(80.0)).unwrap();
        assert!(r.panels_used >= 64 * 81);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(QuadratureSpec { rel_tol: 0.0, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { min_panels: 1, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { min_panels: 64, max_panels: 32, ..spec() }.validate().is_err());
    }
}
