use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A requested value lies beyond the range of a bounded function.
    #[error("range error: {0}")]
    Range(String),
    /// An object could not be built from the supplied parameters.
    #[error("invalid construction: {0}")]
    Construction(String),
    /// The inputs violate a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The pair of measures has no common representation for the requested quantity.
    #[error("unsupported pair: {0}")]
    Unsupported(String),
    /// The instance exceeds the size an exact solver accepts.
    #[error("instance too large: {0}")]
    Size(String),
    /// A quadrature refinement trace signalled an infinite integral.
    #[error("divergent integral: {0}")]
    Divergence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
