use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A graph, plan or record file that does not parse.
    #[error("{origin}: {message}")]
    Format { origin: String, message: String },

    #[error(transparent)]
    Core(#[from] pce_core::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// A plan or command-line request that cannot be executed.
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}

pub fn format_error(origin: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Format {
        origin: origin.into(),
        message: message.into(),
    }
}
