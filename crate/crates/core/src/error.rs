use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} supports at most {max} qubits, got {n}")]
    TooManyQubits { what: &'static str, n: usize, max: usize },

    #[error("Kraus operators are not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("operator must be traceless (|Tr| = {trace_abs:.3e})")]
    NotTraceless { trace_abs: f64 },

    #[error("operator must be Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("N^T N is singular (smallest eigenvalue {lambda_min:.3e}); Hoeffding band undefined")]
    SingularChannel { lambda_min: f64 },

    #[error("infeasible graph: {0}")]
    InfeasibleGraph(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("universality condition violated: {0}")]
    UniversalityViolated(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
