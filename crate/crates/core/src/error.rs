use thiserror::Error;

/// Errors raised before or outside a simulation loop.
///
/// Anomalies that occur mid-run never surface here; they are folded into a
/// [`FailureMode`](crate::mission::FailureMode) on the run record instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("trim failed to converge after {iterations} iterations (residual {residual:.3e})")]
    Trim { iterations: usize, residual: f64 },

    #[error("gain synthesis failed: {0}")]
    Synthesis(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
