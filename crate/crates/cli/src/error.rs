use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] inertia_lab::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        use inertia_lab::Error as E;
        match self {
            Self::Parse { .. } => 2,
            Self::Core(E::InvalidTarget { .. } | E::InvalidConfig(_) | E::BadRank { .. }) => 2,
            Self::Core(E::NotHermitian { .. }) => 3,
            Self::Core(E::DimensionMismatch(_) | E::NonSquare { .. }) => 4,
            Self::Core(E::UnknownLemma(_)) => 5,
            Self::Io { .. } | Self::Csv(_) => 6,
            Self::Core(_) => 1,
        }
    }
}
