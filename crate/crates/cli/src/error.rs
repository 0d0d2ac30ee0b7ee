use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("input contains no hyperedges")]
    EmptyInput,
    #[error("invalid input: {0}")]
    Input(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] hgricci::Error),
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use hgricci::Error as E;
        match self {
            CliError::Core(
                E::DisconnectedSupports
                | E::SinkhornNotConverged { .. }
                | E::EmptyAggregate
                | E::InvalidMeasure(_)
                | E::CostShape { .. }
                | E::Aborted,
            ) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
