use thiserror::Error;

/// Errors produced by grid construction, assembly, solves and scenario I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid boundary spec: {0}")]
    InvalidBoundary(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("operator is singular: {0}")]
    SingularOperator(String),

    #[error("sign violation: {0}")]
    SignViolation(String),

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 solver failure, 3 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SolveFailure(_)
            | Error::SingularOperator(_)
            | Error::SignViolation(_)
            | Error::Simulation(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
