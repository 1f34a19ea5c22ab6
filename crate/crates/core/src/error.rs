use thiserror::Error;

/// Errors raised by the operator, semigroup and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported exponent p = {0}")]
    UnsupportedExponent(f64),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("malformed document: {0}")]
    Document(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable short name of the variant, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Domain(_) => "domain",
            Error::Parameter(_) => "parameter",
            Error::UnsupportedExponent(_) => "unsupported_exponent",
            Error::Decomposition(_) => "decomposition",
            Error::Contract(_) => "contract",
            Error::Resource(_) => "resource",
            Error::Estimation(_) => "estimation",
            Error::Document(_) => "document",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
