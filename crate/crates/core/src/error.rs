use thiserror::Error;

/// Errors surfaced by the library.
///
/// The variants map onto the CLI exit-code triage: `Parameter`, `Domain`,
/// `Shape`, `Data`, and `Parse` are validation failures; `Io` is an I/O
/// failure; `NonConvergence` is a numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's preconditions.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A value falls outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix or vector has an unusable shape.
    #[error("shape error: {0}")]
    Shape(String),

    /// Input data is unusable (non-finite entries, empty samples, ...).
    #[error("data error: {0}")]
    Data(String),

    /// Text input failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An iterative method exhausted its budget without converging.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
