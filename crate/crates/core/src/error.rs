use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("frequency must be finite and positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("latency must be finite and non-negative, got {0}")]
    NegativeLatency(f64),
    #[error("parameter {name} out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("failed to parse profile: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid profile: {0}")]
    Invalid(String),
    #[error("partition index {index} out of range 0..={blocks}")]
    PartitionOutOfRange { index: usize, blocks: usize },
    #[error("unknown block {0}")]
    UnknownBlock(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("no data rows")]
    Empty,
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("failed to read trace: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Fit(#[from] FitError),
}
