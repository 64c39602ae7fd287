use thiserror::Error;

/// Errors raised by the library. Precondition failures of the bounds are
/// reported through [`crate::bounds::BoundReport`] instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {family} parameter: {reason}")]
    InvalidParameter {
        family: &'static str,
        reason: String,
    },

    #[error("{family} produces a negative probability {value:e} at index {index}")]
    NegativeProbability {
        family: String,
        index: usize,
        value: f64,
    },

    #[error("{family}: cumulative mass did not reach 1 - {tail_tol:e} within {max_len} terms")]
    TruncationFailed {
        family: String,
        tail_tol: f64,
        max_len: usize,
    },

    #[error("coefficient stream does not converge at w = 1 (decay ratio {ratio})")]
    Divergent { ratio: f64 },

    #[error("PGF quotient undefined: P(X = 0) = 0")]
    ZeroAtOrigin,

    #[error("no closed-form coefficient stream for a custom PMF")]
    NoClosedForm,

    #[error(
        "under-dispersion: variance {sigma2} does not exceed mean {mu} (requires sigma^2 > mu)"
    )]
    UnderDispersion { mu: f64, sigma2: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("component list is empty")]
    EmptyComponents,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
