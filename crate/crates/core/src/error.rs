use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario file could not be parsed.
    #[error("scenario line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// A scenario or deployment is missing a required value.
    #[error("configuration error: {0}")]
    Missing(String),

    /// A deployment document does not match the schema.
    #[error("deployment schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
