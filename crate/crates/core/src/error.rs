use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("cannot parse law specification `{input}`: {reason}")]
    LawSyntax { input: String, reason: String },

    #[error("tail metadata matches no limit regime: {0}")]
    Unclassifiable(String),

    #[error("operation requires regime {expected}, law is in regime {found}")]
    RegimeMismatch { expected: String, found: String },

    #[error("quadrature did not reach tolerance: {0}")]
    QuadratureFailure(String),

    #[error("root finding failed: {0}")]
    SolverFailure(String),

    #[error("characteristic function inversion failed: {0}")]
    InversionFailure(String),

    #[error("limit law {0} has no distribution function here; compare moments instead")]
    KindMismatch(String),

    #[error("sample size {n} exceeds the exact binomial cap {cap}")]
    Overflow { n: u64, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("replicate {index} failed: {source}")]
    Replicate { index: u64, source: Box<Error> },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
