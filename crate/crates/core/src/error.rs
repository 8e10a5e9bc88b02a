use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box ({x1}, {y1}, {x2}, {y2}): requires x1 < x2 and y1 < y2 with finite coordinates")]
    InvalidBox { x1: f64, y1: f64, x2: f64, y2: f64 },

    #[error("mixed group: expected image '{image_id}' / class '{class_id}', found '{found_image}' / '{found_class}'")]
    MixedGroup {
        image_id: String,
        class_id: String,
        found_image: String,
        found_class: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("index out of range: n={n}, k={k}, G={g}")]
    InvalidIndex { n: u32, k: u64, g: u32 },

    #[error("window [{t_a}, {t_b}] holds {points} point(s); at least 2 are required")]
    TooSmallWindow { t_a: f64, t_b: f64, points: usize },

    #[error("fractal dimension estimation failed: {0}")]
    Estimation(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("empty scene: {0}")]
    EmptyScene(String),

    #[error("nothing to evaluate: {0}")]
    EmptyEvaluation(String),

    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{source_name}:{line}: object {index}: {reason}")]
    InvalidObject {
        source_name: String,
        line: usize,
        index: usize,
        reason: String,
    },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(source_name: &str, line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptyEvaluation(_) => 2,
            _ => 1,
        }
    }
}
