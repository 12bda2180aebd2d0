use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates the documented domain of an operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A geometric or design request cannot be realised, e.g. the requested
    /// aperture is too short to hold the sub-arrays without overlap.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    /// The requested quantity does not exist in the searched range.
    #[error("not found: {0}")]
    NotFound(String),

    /// The signal/noise eigenvalue split is not separated.
    #[error("degenerate subspace: eigenvalues {lower} and {upper} coincide")]
    DegenerateSubspace { lower: f64, upper: f64 },

    /// The least-squares normal matrix is numerically singular.
    #[error("ill-conditioned system (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
