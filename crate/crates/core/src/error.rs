use std::path::PathBuf;

/// Errors produced by the library.
///
/// The CLI maps each variant onto a stable process exit code through
/// [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{}: malformed PGM at byte offset {offset}: {message}", path.display())]
    Parse {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("{}: payload size mismatch, header needs {expected} bytes but found {found}", path.display())]
    SizeMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("dataset inventory incomplete, {} missing: {}", missing.len(), preview(missing))]
    Inventory { missing: Vec<String> },

    #[error("requested {requested} eigenfaces but only {attainable} nonzero directions are attainable")]
    Rank { requested: usize, attainable: usize },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Divergence { epoch: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

fn preview(items: &[String]) -> String {
    const SHOWN: usize = 12;
    let mut s = items.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if items.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", items.len() - SHOWN));
    }
    s
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 configuration, 3 data, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) => 2,
            Error::Parse { .. }
            | Error::SizeMismatch { .. }
            | Error::Inventory { .. }
            | Error::Rank { .. }
            | Error::Io { .. }
            | Error::Serde(_) => 3,
            Error::Divergence { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
