use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Exit status for configuration and usage problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for problems in the data being processed.
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] psylex_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<u64>,
        message: String,
    },

    /// A resource file that could not be loaded; always a configuration problem.
    #[error("{what}: {source}")]
    Resource {
        what: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Data(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: Option<u64>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_config() => EXIT_CONFIG,
            Error::Core(_) => EXIT_DATA,
            Error::Io { .. } | Error::Resource { .. } | Error::Config(_) => EXIT_CONFIG,
            Error::Parse { .. } | Error::Data(_) => EXIT_DATA,
        }
    }
}
