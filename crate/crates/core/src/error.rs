use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a density operator: minimum eigenvalue {min_eigenvalue:.3e} below tolerance")]
    NotDensityOperator { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("incomplete quorum: missing settings [{}]", missing.join(", "))]
    IncompleteQuorum { missing: Vec<String> },

    #[error("spec syntax error at line {line}, column {column}: {message}")]
    SpecSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("spec error at `{path}`: {message}")]
    Spec { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
