use thiserror::Error;

/// Errors raised by the library. Variants map onto the CLI exit codes via [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("out of branch: {0}")]
    OutOfBranch(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("inconsistent sample: {0}")]
    Inconsistency(String),
    #[error("parameters are not orbit-like: {0}")]
    NotOrbitLike(String),
    #[error("integration failed: {0}")]
    Stiffness(String),
    #[error("curve reached the boundary: {0}")]
    BoundaryCollision(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
    #[error("accuracy: {0}")]
    Accuracy(String),
}

impl Error {
    /// 2 for domain-type errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::OutOfBranch(_) | Error::Input(_) | Error::Shape(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
