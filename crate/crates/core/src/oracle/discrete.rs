use core::f64::consts::PI;

use libm::{cos, sin};
use num_complex::Complex64;

use super::RingSpec;
use crate::correlators::ContractionSet;
use crate::model;

/// Contractions of a ring of `N` modes at `k = 2πm/N`.
///
/// Writing `b_j(t) = Σ_l (U_{l-j} b_l + V_{l-j} b_l†)` with
/// `U_x = (1/N) Σ_k e^{ikx} c_k` and `V_x = -(2/N) Σ_k e^{ikx} d_k`, the
/// polarized initial state gives `⟨b_j† b_m⟩ = Σ_l conj(U_{l-j}) U_{l-m}` and
/// `⟨b_j b_m⟩ = Σ_l V_{l-j} U_{l-m}`. Parseval reduces these to
/// `(1/N) Σ_k e^{ikr} |c_k|²` and `(1/N) Σ_k (-2i d_k c_k) sin(kr)`.
pub fn discrete_k_contractions(ring: &RingSpec, t: f64) -> ContractionSet {
    let n_modes = ring.sites;
    let mut occ = [0.0f64; 3];
    let mut pair = [Complex64::new(0.0, 0.0); 2];
    for m in 0..n_modes {
        let k = 2.0 * PI * m as f64 / n_modes as f64 - PI;
        let ev = model::mode_coeffs(&ring.params, k, t);
        let c2 = ev.c.norm_sqr();
        let p = Complex64::new(0.0, -2.0 * ev.d) * ev.c;
        occ[0] += c2;
        occ[1] += cos(k) * c2;
        occ[2] += cos(2.0 * k) * c2;
        pair[0] += p * sin(k);
        pair[1] += p * sin(2.0 * k);
    }
    let inv = 1.0 / n_modes as f64;
    ContractionSet {
        n: occ[0] * inv,
        h1: occ[1] * inv,
        a1: pair[0] * inv,
        h2: occ[2] * inv,
        a2: pair[1] * inv,
    }
}
