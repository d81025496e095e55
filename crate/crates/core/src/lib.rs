//! Post-quench dynamics of two-site correlations in the infinite transverse-field XY chain.
//!
//! The chain starts fully polarized along +z and the exchange coupling is switched on
//! suddenly. Everything downstream of the free-fermion solution lives here:
//!
//! - [`model`]: quasiparticle spectrum, Bogoliubov coefficients, mode evolution.
//! - [`quadrature`]: periodic midpoint rule with panel doubling.
//! - [`correlators`]: thermodynamic-limit fermion contractions and the two-site
//!   reduced density matrices for nearest and next-nearest neighbours.
//! - [`qinfo`]: concurrence, entropies, classical correlation and discord of X-states.
//! - [`dynamics`]: time series, first-peak detection, boundary and onset scans.
//! - [`oracle`]: discrete-momentum mode sums and exact diagonalization of a finite ring.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod correlators;
pub mod dynamics;
mod error;
pub mod model;
pub mod oracle;
pub mod qinfo;
pub mod quadrature;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub use correlators::{ContractionSet, Pair, Variant, XState};
pub use model::ModelParams;
pub use qinfo::{CorrelationTriple, OptimizerSettings};
pub use quadrature::QuadratureSpec;
