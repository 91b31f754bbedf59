use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid spec `{token}`: {message}")]
    Spec { token: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible graph: {0}")]
    InfeasibleGraph(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for graphs that cannot exist, 4 for numerical
    /// breakdown, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec { .. } | CliError::Config(_) => 2,
            CliError::InfeasibleGraph(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<nibp::Error> for CliError {
    fn from(e: nibp::Error) -> Self {
        match e {
            nibp::Error::InfeasibleGraph(m) => CliError::InfeasibleGraph(m),
            nibp::Error::Numerical(m) => CliError::Numerical(m),
            e @ nibp::Error::SingularChannel { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
