//! Simulation traces `sigma = (y, u, p)`, metrics and signed distance to
//! predicate sets.

mod distance;
pub mod io;
mod model;

pub use distance::{signed_distance, Metric};
pub use io::{read_trace, write_trace};
pub use model::{
    validate_trace, ChannelKind, Sample, SignalSpace, Trace, TraceIssue, ValidationReport,
};

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("point has no value for channel `{0}`")]
    MissingChannel(String),
    #[error("invalid trace: {0}")]
    Invalid(TraceIssue),
    #[error("trace header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("trace row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("trace metadata: {0}")]
    Json(#[from] serde_json::Error),
}
