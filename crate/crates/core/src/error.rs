use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or missing input (empty samples, bad grid sizes, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Moment fit produced a zero scale.
    #[error("degenerate sample `{0}`: estimated scale is zero")]
    DegenerateSample(String),

    /// The populations do not carry the known parameters a case requires.
    #[error("configuration error: {0}")]
    Configuration(String),
}
