use alloc::boxed::Box;
use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("quadrature did not converge within {panels} panels (last refinement changed the result by {discrepancy:e})")]
    NoConvergence { panels: usize, discrepancy: f64 },

    #[error("{what} failed at lambda={lambda}, gamma={gamma}, t={t}: {source}")]
    AtPoint {
        what: &'static str,
        lambda: f64,
        gamma: f64,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid two-site state: {0}")]
    InvalidState(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("measurement optimizer failed: {0}")]
    OptimizerFailure(String),

    #[error("degenerate scan: {0}")]
    Degenerate(String),

    #[error("a ring of {sites} sites exceeds the exact-diagonalization cap of {max}")]
    DimensionTooLarge { sites: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field, reason: reason.into() }
    }

    pub(crate) fn at(self, what: &'static str, lambda: f64, gamma: f64, t: f64) -> Self {
        Error::AtPoint { what, lambda, gamma, t, source: Box::new(self) }
    }

    /// Innermost error, skipping [`Error::AtPoint`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NoConvergence { .. }
                | Error::OptimizerFailure(_)
                | Error::InvalidState(_)
                | Error::Degenerate(_)
        )
    }
}
