use thiserror::Error;

use crate::fixedpoint::IterationTrace;
use crate::holomap::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point or argument lies outside the open domain an operation requires.
    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("inclusion is not relatively compact (gap {gap:e} below floor)")]
    NotRelativelyCompact { gap: f64 },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("sampling exhausted: found {found} of {requested} points")]
    SamplingExhausted { found: usize, requested: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("evaluation singularity: division by {modulus:e}")]
    Singularity { modulus: f64 },

    #[error("invalid path: {0}")]
    PathInvalid(String),

    #[error("no in-domain polyline joins the endpoints")]
    Connectivity,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence {
        iterations: usize,
        last_step: f64,
        trace: Box<IterationTrace>,
    },

    #[error("configuration error: {0}")]
    Configuration(String),
}

impl Error {
    pub(crate) fn outside(what: impl Into<String>) -> Self {
        Error::OutsideDomain(what.into())
    }

    pub(crate) fn invalid(what: impl Into<String>) -> Self {
        Error::InvalidArgument(what.into())
    }

    /// True for errors caused by unmet mathematical preconditions (as opposed
    /// to malformed input or non-convergence).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::OutsideDomain(_)
                | Error::NotRelativelyCompact { .. }
                | Error::Precondition(_)
                | Error::Singularity { .. }
                | Error::PathInvalid(_)
                | Error::Connectivity
                | Error::SamplingExhausted { .. }
        )
    }
}
