use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported input dimension {m}: {reason}")]
    UnsupportedDimension { m: usize, reason: &'static str },

    #[error("non-finite data: {0}")]
    Data(String),

    #[error("inadmissible activation pair: {0}")]
    Inadmissible(String),

    #[error("all targets are zero; mixture weights are undefined")]
    DegenerateWeights,

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("draw {index}: {source}")]
    Draw {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated at index {index}: {reason}")]
    Precondition { index: usize, reason: String },

    #[error("rank-deficient design (rank {rank} < {cols}); use a positive ridge parameter")]
    RankDeficient { rank: usize, cols: usize },

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("training diverged at step {step}")]
    TrainingDiverged { step: usize },

    #[error("format error in {path} at byte offset {offset}: {reason}")]
    Format {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable category, used for CLI exit reporting and run manifests.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Dimension(_) | Error::UnsupportedDimension { .. } => "dimension",
            Error::Data(_) => "data",
            Error::Inadmissible(_) => "admissibility",
            Error::DegenerateWeights | Error::DegenerateData(_) => "degenerate",
            Error::Draw { source, .. } => source.category(),
            Error::Precondition { .. } => "precondition",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::NumericalOverflow(_) | Error::TrainingDiverged { .. } => "numerical",
            Error::Format { .. } | Error::Range(_) => "format",
            Error::ResourceLimit(_) => "resource",
            Error::Config(_) => "config",
            Error::Io { .. } | Error::Csv(_) | Error::Json(_) => "io",
        }
    }

    /// Process exit code for the category.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" | "invalid-argument" => 2,
            "io" => 3,
            "format" => 4,
            "dimension" | "data" | "degenerate" | "precondition" => 5,
            "numerical" | "rank-deficient" | "admissibility" => 6,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite, got {x}"
        )))
    }
}
