use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: packseq_core::Error,
    },
    #[error("malformed {what}: {source}")]
    Document {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported {what} format `{found}`")]
    Version { what: &'static str, found: String },
    #[error(transparent)]
    Core(#[from] packseq_core::Error),
    #[error("{0}")]
    Pool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
