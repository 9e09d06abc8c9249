use std::path::PathBuf;

use rydberg_core::Error as CoreError;

/// Failure of a CLI run, grouped into exit-code categories.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{origin}:{line}: parse error: {msg}")]
    Parse { origin: String, line: usize, msg: String },

    #[error("{origin}:{line}: unit error: {msg}")]
    Unit { origin: String, line: usize, msg: String },

    #[error("{origin}:{line}: invalid value for `{key}`: {msg}")]
    Invalid { origin: String, line: usize, key: String, msg: String },

    #[error("config file not found: {}", path.display())]
    MissingFile { path: PathBuf },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },

    #[error("domain error: {0}")]
    Domain(CoreError),

    #[error("numerical error: {0}")]
    Numerical(CoreError),
}

impl SimError {
    /// 2 usage/parse, 3 domain, 4 I/O, 5 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Usage(_) | SimError::Parse { .. } | SimError::Unit { .. } => 2,
            SimError::Invalid { .. } | SimError::Domain(_) => 3,
            SimError::MissingFile { .. } | SimError::Io { .. } | SimError::Format { .. } => 4,
            SimError::Numerical(_) => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }
}

impl From<CoreError> for SimError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::Range(_) => SimError::Domain(e),
            _ => SimError::Numerical(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
