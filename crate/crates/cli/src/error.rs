use loewner::LoewnerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] LoewnerError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// The report was written but at least one check failed.
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// Process exit status: 2 usage, 3 continuation failure, 4 domain
    /// error, 5 I/O, 1 failed verification checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(e) => match e {
                LoewnerError::Domain(_) | LoewnerError::OnSlit { .. } => 4,
                LoewnerError::Singularity(_)
                | LoewnerError::Branch(_)
                | LoewnerError::Continuation { .. }
                | LoewnerError::StepUnderflow { .. }
                | LoewnerError::Extrapolation { .. }
                | LoewnerError::InsufficientData(_) => 3,
            },
            CliError::Io { .. } => 5,
            CliError::ChecksFailed { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
