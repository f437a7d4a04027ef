use thiserror::Error;

/// Errors raised by the analyses in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("malformed spherical graph: {0}")]
    MalformedGraph(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported retraction shape: {0}")]
    UnsupportedShape(String),

    #[error("classification unavailable: {0}")]
    ClassificationUnavailable(String),

    #[error("inconsistent energies: {0}")]
    InconsistentEnergies(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("parse error in {what} at line {line}: {reason}")]
    Parse {
        what: &'static str,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
