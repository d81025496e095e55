//! Validation oracles that reach the same quantities by independent routes.
//!
//! - [`discrete_k_contractions`] replaces the Brillouin-zone integrals by
//!   finite mode sums built from the single-mode evolution coefficients.
//! - [`SpinRing`] evolves the polarized state of a finite periodic ring under
//!   the spin Hamiltonian itself, without any fermionization.

mod discrete;
mod ed;

pub use discrete::discrete_k_contractions;
pub use ed::{arbitration_report, ed_evolve, ArbitrationReport, ArbitrationRow, EdEvolution, PairReducedState, SpinRing};

use crate::model::ModelParams;
use crate::{Error, Result};

/// Largest ring handled by exact diagonalization.
pub const MAX_ED_SITES: usize = 12;

/// A finite periodic ring: `S_{N+i} = S_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSpec {
    pub sites: usize,
    pub params: ModelParams,
}

impl RingSpec {
    pub fn new(sites: usize, params: ModelParams) -> Result<Self> {
        if sites < 2 {
            return Err(Error::invalid("sites", "a ring needs at least two sites"));
        }
        Ok(Self { sites, params })
    }
}
