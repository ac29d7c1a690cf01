use thiserror::Error;

/// Errors raised by the library and the batch runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point lies outside the domain: {0}")]
    OutsideDomain(String),

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("image left the target domain: {0}")]
    NumericalDomain(String),

    #[error("principal branch cut crossed: {0}")]
    BranchCut(String),

    #[error("invalid parameters: {0}")]
    InvalidParameter(String),

    #[error("normal form recovery failed: unitarity defect {0:e}")]
    NormalForm(f64),

    #[error("classification inconclusive after {0} iterations")]
    InconclusiveClassification(usize),

    #[error("interior limit detected, generator is not a properly discontinuous candidate (defect {0:e})")]
    NotProperlyDiscontinuousCandidate(f64),

    #[error("group does not act properly discontinuously: {0}")]
    NotProperlyDiscontinuous(String),

    #[error("potential series does not converge: {0}")]
    DivergentPotential(String),

    #[error("finite-difference stencil leaves the domain at {0}")]
    Stencil(String),

    #[error("patch parameters rejected: {0}")]
    PatchParam(String),

    #[error("premise not satisfied: {0}")]
    Premise(String),

    #[error("operation not supported on this domain: {0}")]
    Unsupported(String),

    #[error("render failed: {0}")]
    Render(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
