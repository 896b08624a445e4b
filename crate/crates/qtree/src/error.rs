use std::path::Path;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}line {line}, column {column}: {message}", prefix(.path))]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] quartet_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

fn prefix(path: &str) -> String {
    if path.is_empty() {
        String::new()
    } else {
        format!("{path}: ")
    }
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: String::new(), line, column, message: message.into() }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Error {
        Error::Io { path: path.display().to_string(), source }
    }

    /// Attaches a file name to a parse error.
    pub fn in_file(self, file: &Path) -> Error {
        match self {
            Error::Parse { line, column, message, .. } => {
                Error::Parse { path: file.display().to_string(), line, column, message }
            }
            other => other,
        }
    }

    /// Process exit status: 2 usage, 3 bad input, 4 broken invariant.
    pub fn exit_code(&self) -> i32 {
        use quartet_core::Error as E;
        match self {
            Error::Usage(_) | Error::Core(E::InvalidConfig(_)) => 2,
            Error::Parse { .. } | Error::Io { .. } => 3,
            Error::Core(E::MutationNotApplicable(_) | E::InvalidNode(_)) => 4,
            Error::Core(_) => 3,
            Error::Internal(_) => 4,
        }
    }
}
