//! Exact evolution of a finite ring under the spin Hamiltonian.
//!
//! Basis states are bit strings with bit `i` set when site `i` points down.
//! Every term of `H` flips spins in pairs, so the state stays in the sector
//! with an even number of down spins, which is all we store.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use super::{RingSpec, MAX_ED_SITES};
use crate::correlators::{self, ContractionSet, Variant, XState};
use crate::quadrature::QuadratureSpec;
use crate::{Error, Result};

/// Rings up to this size are propagated through a full eigendecomposition.
const EIGEN_MAX_SITES: usize = 10;
/// Step of the Taylor propagator used above that size.
const TAYLOR_STEP: f64 = 1e-3;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The Hamiltonian restricted to the even sector, in compressed rows.
#[derive(Debug, Clone)]
pub struct SpinRing {
    ring: RingSpec,
    states: Vec<u32>,
    /// Sector position of each full-space state; `u32::MAX` if odd.
    position: Vec<u32>,
    diag: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SpinRing {
    pub fn new(ring: RingSpec) -> Result<Self> {
        let n = ring.sites;
        if n > MAX_ED_SITES {
            return Err(Error::DimensionTooLarge { sites: n, max: MAX_ED_SITES });
        }
        if n < 4 || n % 2 == 1 {
            return Err(Error::invalid("sites", "exact diagonalization needs an even ring of at least 4 sites"));
        }
        let (lambda, gamma) = (ring.params.lambda(), ring.params.gamma());

        let full = 1usize << n;
        let states: Vec<u32> = (0..full as u32).filter(|s| s.count_ones() % 2 == 0).collect();
        let mut position = vec![u32::MAX; full];
        for (i, &s) in states.iter().enumerate() {
            position[s as usize] = i as u32;
        }

        // -λ[(1+γ)SˣSˣ + (1-γ)SʸSʸ] = -(λ/2)(S⁺S⁻ + S⁻S⁺) - (λγ/2)(S⁺S⁺ + S⁻S⁻)
        // and -Sᶻ = -(1/2 - bit).
        let hop = -0.5 * lambda;
        let pairing = -0.5 * lambda * gamma;
        let mut diag = Vec::with_capacity(states.len());
        let mut row_start = Vec::with_capacity(states.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &s in &states {
            row_start.push(cols.len());
            let down = s.count_ones() as f64;
            diag.push(-(0.5 * n as f64 - down));
            for i in 0..n {
                let j = (i + 1) % n;
                let (bi, bj) = ((s >> i) & 1, (s >> j) & 1);
                let amp = if bi != bj { hop } else { pairing };
                if amp != 0.0 {
                    let target = s ^ (1 << i) ^ (1 << j);
                    cols.push(position[target as usize]);
                    vals.push(amp);
                }
            }
        }
        row_start.push(cols.len());
        Ok(Self { ring, states, position, diag, row_start, cols, vals })
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// `out = H psi`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = psi[r] * self.diag[r];
            for idx in self.row_start[r]..self.row_start[r + 1] {
                acc += psi[self.cols[idx] as usize] * self.vals[idx];
            }
            *o = acc;
        }
    }

    pub fn energy(&self, psi: &[Complex64]) -> f64 {
        let mut h = vec![ZERO; psi.len()];
        self.apply(psi, &mut h);
        psi.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum()
    }

    fn dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..d {
            m[(r, r)] += self.diag[r];
            for idx in self.row_start[r]..self.row_start[r + 1] {
                m[(r, self.cols[idx] as usize)] += self.vals[idx];
            }
        }
        m
    }

    /// All spins up.
    pub fn polarized(&self) -> Vec<Complex64> {
        let mut psi = vec![ZERO; self.dim()];
        psi[self.position[0] as usize] = Complex64::new(1.0, 0.0);
        psi
    }

    /// Reduced density matrix of sites `i` and `j` (0-based, `i` first in the
    /// two-site basis).
    pub fn pair_state(&self, psi: &[Complex64], i: usize, j: usize) -> Result<PairReducedState> {
        let n = self.ring.sites;
        if i >= n || j >= n || i == j {
            return Err(Error::invalid("pair", format!("sites ({i}, {j}) are not two distinct sites of a {n}-ring")));
        }
        let mut m = [[ZERO; 4]; 4];
        let mask = !((1u32 << i) | (1u32 << j));
        for (idx, &s) in self.states.iter().enumerate() {
            let amp = psi[idx];
            if amp == ZERO {
                continue;
            }
            let row = (((s >> i) & 1) * 2 + ((s >> j) & 1)) as usize;
            let rest = s & mask;
            for col in 0..4u32 {
                let other = rest | ((col >> 1) << i) | ((col & 1) << j);
                let p = self.position[other as usize];
                if p != u32::MAX {
                    m[row][col as usize] += amp * psi[p as usize].conj();
                }
            }
        }
        Ok(PairReducedState { m })
    }
}

#[derive(Debug, Clone)]
enum Propagator {
    Eigen { vectors: DMatrix<f64>, energies: Vec<f64>, overlaps: Vec<f64> },
    Taylor { psi: Vec<Complex64>, t: f64 },
}

/// Time evolution of the polarized state on one ring. Reuses the
/// factorization (small rings) or the last propagated state (N = 12)
/// across calls.
#[derive(Debug, Clone)]
pub struct EdEvolution {
    ring: SpinRing,
    propagator: Propagator,
}

impl EdEvolution {
    pub fn new(spec: RingSpec) -> Result<Self> {
        let ring = SpinRing::new(spec)?;
        let start = ring.position[0] as usize;
        let propagator = if spec.sites <= EIGEN_MAX_SITES {
            let eig = SymmetricEigen::new(ring.dense());
            let overlaps = (0..ring.dim()).map(|c| eig.eigenvectors[(start, c)]).collect();
            Propagator::Eigen { vectors: eig.eigenvectors, energies: eig.eigenvalues.iter().copied().collect(), overlaps }
        } else {
            Propagator::Taylor { psi: ring.polarized(), t: 0.0 }
        };
        Ok(Self { ring, propagator })
    }

    pub fn ring(&self) -> &SpinRing {
        &self.ring
    }

    /// State at time `t ≥ 0` in the even-sector basis.
    pub fn state_at(&mut self, t: f64) -> Result<Vec<Complex64>> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid("t", "must be finite and non-negative"));
        }
        if t == 0.0 {
            return Ok(self.ring.polarized());
        }
        match &mut self.propagator {
            Propagator::Eigen { vectors, energies, overlaps } => {
                let d = energies.len();
                let coeffs: Vec<Complex64> = (0..d).map(|c| Complex64::from_polar(overlaps[c], -energies[c] * t)).collect();
                Ok((0..d)
                    .map(|r| (0..d).fold(ZERO, |acc, c| acc + coeffs[c] * vectors[(r, c)]))
                    .collect())
            }
            Propagator::Taylor { psi, t: now } => {
                if t < *now {
                    *psi = self.ring.polarized();
                    *now = 0.0;
                }
                let mut scratch = (vec![ZERO; psi.len()], vec![ZERO; psi.len()]);
                while *now < t {
                    let dt = TAYLOR_STEP.min(t - *now);
                    taylor_step(&self.ring, psi, dt, &mut scratch);
                    *now = if t - *now <= TAYLOR_STEP { t } else { *now + dt };
                }
                Ok(psi.clone())
            }
        }
    }

    pub fn pair_state_at(&mut self, t: f64, i: usize, j: usize) -> Result<PairReducedState> {
        let psi = self.state_at(t)?;
        self.ring.pair_state(&psi, i, j)
    }
}

/// `psi ← exp(-i H dt) psi`, summing the Taylor series until the terms drop
/// below rounding.
fn taylor_step(ring: &SpinRing, psi: &mut [Complex64], dt: f64, scratch: &mut (Vec<Complex64>, Vec<Complex64>)) {
    let (term, next) = scratch;
    term.copy_from_slice(psi);
    for order in 1..64 {
        ring.apply(term, next);
        let factor = Complex64::new(0.0, -dt / order as f64);
        let mut norm = 0.0;
        for (t, n) in term.iter_mut().zip(next.iter()) {
            *t = n * factor;
            norm += t.norm_sqr();
        }
        for (p, t) in psi.iter_mut().zip(term.iter()) {
            *p += t;
        }
        if norm < 1e-34 {
            break;
        }
    }
}

/// Dense 4×4 reduced state of a site pair, basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairReducedState {
    pub m: [[Complex64; 4]; 4],
}

impl PairReducedState {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut e = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                e = e.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        e
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let m = Matrix4::from_fn(|i, j| self.m[i][j]);
        let mut ev: [f64; 4] = SymmetricEigen::new(m).eigenvalues.into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Largest entry outside the diagonal and anti-diagonal.
    pub fn non_x_magnitude(&self) -> f64 {
        let mut e = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    e = e.max(self.m[i][j].norm());
                }
            }
        }
        e
    }

    /// The X-shaped part of the matrix.
    pub fn x_part(&self) -> XState {
        XState {
            r11: self.m[0][0].re,
            r22: self.m[1][1].re,
            r33: self.m[2][2].re,
            r44: self.m[3][3].re,
            r14: self.m[0][3],
            r23: self.m[1][2],
        }
    }

    /// Max-norm distance to an X-state, counting the non-X entries too.
    pub fn max_abs_diff(&self, x: &XState) -> f64 {
        let other = x.to_matrix();
        let mut e = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                e = e.max((self.m[i][j] - other[i][j]).norm());
            }
        }
        e
    }
}

/// Evolve the polarized ring to time `t` and reduce to sites `(i, j)`.
pub fn ed_evolve(ring: &RingSpec, t: f64, pair: (usize, usize)) -> Result<PairReducedState> {
    EdEvolution::new(*ring)?.pair_state_at(t, pair.0, pair.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbitrationRow {
    pub t: f64,
    /// Nearest pair, for reference.
    pub nearest: f64,
    pub wick_derived: f64,
    pub as_printed: f64,
}

/// Deviation of each next-nearest variant from exact diagonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ArbitrationReport {
    pub sites: usize,
    pub rows: Vec<ArbitrationRow>,
    pub max_nearest: f64,
    pub max_wick_derived: f64,
    pub max_as_printed: f64,
}

/// Compare the thermodynamic-limit matrices of sites (1,2) and (1,3)
/// against a finite ring at each time of `times` (ascending). The
/// next-nearest variants are compared unvalidated, so an unphysical
/// variant still yields a deviation.
pub fn arbitration_report(ring: &RingSpec, times: &[f64], spec: &QuadratureSpec) -> Result<ArbitrationReport> {
    let mut ed = EdEvolution::new(*ring)?;
    let params = ring.params;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let psi = ed.state_at(t)?;
        let exact_nn = ed.ring.pair_state(&psi, 0, 1)?;
        let exact_nnn = ed.ring.pair_state(&psi, 0, 2)?;
        let cs: ContractionSet = correlators::contractions(&params, t, spec)?;
        rows.push(ArbitrationRow {
            t,
            nearest: exact_nn.max_abs_diff(&correlators::assemble_nn(&cs)),
            wick_derived: exact_nnn.max_abs_diff(&correlators::assemble_nnn(&cs, Variant::WickDerived)),
            as_printed: exact_nnn.max_abs_diff(&correlators::assemble_nnn(&cs, Variant::AsPrinted)),
        });
    }
    let max_of = |f: fn(&ArbitrationRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(ArbitrationReport {
        sites: ring.sites,
        max_nearest: max_of(|r| r.nearest),
        max_wick_derived: max_of(|r| r.wick_derived),
        max_as_printed: max_of(|r| r.as_printed),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn ring(n: usize, l: f64, g: f64) -> RingSpec {
        RingSpec::new(n, ModelParams::new(l, g).unwrap()).unwrap()
    }

    #[test]
    fn size_limits() {
        assert!(matches!(SpinRing::new(ring(14, 1.0, 1.0)), Err(Error::DimensionTooLarge { sites: 14, .. })));
        assert!(SpinRing::new(ring(7, 1.0, 1.0)).is_err());
        assert_eq!(SpinRing::new(ring(8, 1.0, 1.0)).unwrap().dim(), 128);
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let r = SpinRing::new(ring(6, 0.8, 0.6)).unwrap();
        let d = r.dense();
        assert!((&d - d.transpose()).amax() < 1e-15);
    }

    #[test]
    fn initial_pair_state_is_polarized() {
        let rho = ed_evolve(&ring(8, 0.7, 1.0), 0.0, (0, 2)).unwrap();
        assert!(rho.max_abs_diff(&XState::POLARIZED) < 1e-15);
    }

    #[test]
    fn eigen_and_taylor_propagators_agree() {
        let spec = ring(8, 1.1, 0.7);
        let mut eig = EdEvolution::new(spec).unwrap();
        let r = SpinRing::new(spec).unwrap();
        let mut psi = r.polarized();
        let mut scratch = (vec![ZERO; psi.len()], vec![ZERO; psi.len()]);
        for _ in 0..1000 {
            taylor_step(&r, &mut psi, 1e-3, &mut scratch);
        }
        let exact = eig.state_at(1.0).unwrap();
        let err = psi.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-11, "{err}");
    }
}
