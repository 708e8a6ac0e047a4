use thiserror::Error;

/// Errors raised anywhere in the core crate.
///
/// The variants map onto the CLI exit-code classes: `Validation` is a bad
/// input, `Solver`/`Geometry`/`Construction` are numerical failures and
/// `Oracle` means an independent check caught the solver lying.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("oracle violation: {0}")]
    Oracle(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::Geometry(_) => "geometry",
            Error::Range(_) => "range",
            Error::Solver(_) => "solver",
            Error::Construction(_) => "construction",
            Error::Bracket(_) => "bracket",
            Error::Oracle(_) => "oracle",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
