use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library and surfaced by the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A fatal problem on a specific line of an input file.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A structurally invalid lexicon, model, or config file.
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training failed: {0}")]
    Training(String),

    /// Ids required by an operation but absent from its input.
    #[error("{context}: {} missing id(s): {}", ids.len(), preview_ids(ids))]
    MissingIds { context: String, ids: Vec<String> },

    #[error("post {id} published at {at} falls outside the event window")]
    OutOfWindow { id: String, at: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn schema(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

const ID_PREVIEW_LIMIT: usize = 10;

fn preview_ids(ids: &[String]) -> String {
    if ids.len() <= ID_PREVIEW_LIMIT {
        ids.join(", ")
    } else {
        format!(
            "{}, … ({} more)",
            ids[..ID_PREVIEW_LIMIT].join(", "),
            ids.len() - ID_PREVIEW_LIMIT
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_ids_message_lists_ids() {
        let err = Error::MissingIds {
            context: "predictions".into(),
            ids: vec!["7".into(), "9".into()],
        };
        let text = err.to_string();
        assert!(text.contains("7"), "{text}");
        assert!(text.contains("9"), "{text}");
    }

    #[test]
    fn missing_ids_message_is_capped() {
        let ids: Vec<String> = (0..50).map(|i| i.to_string()).collect();
        let err = Error::MissingIds {
            context: "predictions".into(),
            ids,
        };
        let text = err.to_string();
        assert!(text.contains("(40 more)"), "{text}");
    }
}
