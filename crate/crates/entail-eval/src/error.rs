use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for the whole crate.
///
/// Variants are grouped by the stage that produces them: input validation,
/// backend traffic, response parsing, statistics, and the run harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A domain object failed an invariant check (empty id, empty gold set, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Transport-level failure talking to a backend. Retryable.
    #[error("network error: {0}")]
    Network(String),

    /// The backend rejected our credentials. Never retried.
    #[error("authentication error: {0}")]
    Auth(String),

    /// Replay-only gateway was asked for a request that is not in the cache.
    #[error("cache miss in replay-only mode (key {key})")]
    CacheMiss { key: String },

    /// The backend returned a response with no usable text.
    #[error("backend returned an empty response")]
    EmptyResponse,

    /// An entailment response contained zero or several candidate labels.
    #[error("cannot parse entailment label from response: {0:?}")]
    LabelParse(String),

    /// An explanation response contained no numbered steps.
    #[error("no numbered steps found in explanation: {0:?}")]
    NoStepsFound(String),

    /// A rating response did not contain an integer in 1..=5.
    #[error("cannot parse 1-5 score from response: {0:?}")]
    ScoreParse(String),

    /// Cross-run sequences passed to an agreement metric are misaligned.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Paired statistical inputs have different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A sample does not support the requested statistic
    /// (single-class AUROC, undecidable Brunner-Munzel, empty group, ...).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// A numeric or structural argument is out of range (NaN score, empty corpus, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Bad configuration (unknown policy name, missing credentials env var, ...).
    #[error("config error: {0}")]
    Config(String),

    /// A dataset file could not be ingested.
    #[error("dataset error: {0}")]
    Dataset(String),

    /// A transcript cache file is malformed. Reported with a 1-based line number;
    /// the importing cache is left untouched.
    #[error("cache format error at line {line}: {msg}")]
    CacheFormat { line: usize, msg: String },

    /// Too many per-item failures: the run aborted.
    #[error("run aborted: {0}")]
    Run(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether a gateway should retry the request that produced this error.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Network(_))
    }

    /// Short machine-readable kind, used in per-item failure records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Network(_) => "network",
            Error::Auth(_) => "auth",
            Error::CacheMiss { .. } => "cache_miss",
            Error::EmptyResponse => "empty_response",
            Error::LabelParse(_) => "label_parse",
            Error::NoStepsFound(_) => "no_steps_found",
            Error::ScoreParse(_) => "score_parse",
            Error::Alignment(_) => "alignment",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DegenerateSample(_) => "degenerate_sample",
            Error::InvalidInput(_) => "invalid_input",
            Error::Config(_) => "config",
            Error::Dataset(_) => "dataset",
            Error::CacheFormat { .. } => "cache_format",
            Error::Run(_) => "run",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

impl Error {
    pub(crate) fn validation(msg: impl fmt::Display) -> Self {
        Error::Validation(msg.to_string())
    }
}
