use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    RawIo(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("config write error: {0}")]
    TomlWrite(#[from] toml::ser::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error("missing mandatory column `{0}` in CSV header")]
    MissingColumn(String),

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("point ({x}, {y}) lies outside the spatial domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("a {0} m cell has no parent granularity")]
    NoParent(u32),

    #[error("unsupported granularity {0} m (expected 50, 200, 1000 or 5000)")]
    Granularity(u32),

    #[error("unknown heatmap type id {0}")]
    UnknownHeatmapType(u32),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("malformed {kind} file: {message}")]
    Format { kind: &'static str, message: String },

    #[error("missing artifact {path}; run `aisdw {command}` first")]
    MissingArtifact {
        path: PathBuf,
        command: &'static str,
    },

    #[error("result undefined: {0}")]
    Undefined(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(kind: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            kind,
            message: message.into(),
        }
    }
}
