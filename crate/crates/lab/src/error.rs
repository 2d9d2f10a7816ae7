use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed document. `line` is 1-based; `field` is the dotted path of
    /// the value being read, empty at the top level.
    #[error("ParseError(line {line}, field \"{field}\"): {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    /// Well-formed document describing an invalid scenario.
    #[error("ValidationError(\"{field}\", \"{reason}\"): {detail}")]
    Validation {
        field: String,
        reason: String,
        detail: String,
    },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] foliated_core::Error),
}

impl LabError {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>, detail: impl Into<String>) -> Self {
        LabError::Validation {
            field: field.into(),
            reason: reason.into(),
            detail: detail.into(),
        }
    }

    /// The core diagnostic behind this error, when there is one.
    pub fn code(&self) -> &str {
        match self {
            LabError::Io { .. } => "Io",
            LabError::Parse { .. } => "ParseError",
            LabError::Validation { reason, .. } => reason,
            LabError::Usage(_) => "Usage",
            LabError::Core(e) => e.code(),
        }
    }
}
