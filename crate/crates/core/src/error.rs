use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("payload mismatch: {left} point against {right} point")]
    PayloadMismatch { left: &'static str, right: &'static str },
    #[error("metric {metric} cannot measure {payload} payloads")]
    UnsupportedPayload {
        metric: &'static str,
        payload: &'static str,
    },
    #[error("all points coincide; the sample has zero diameter")]
    DegenerateDiameter,
    #[error("empty point set")]
    Empty,
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("truncation bounds out of order: {lo} > {hi}")]
    TruncationBounds { lo: f64, hi: f64 },
    #[error("label {0} is outside the label space")]
    UnknownLabel(usize),
    #[error("interpolation certificate fails for points {i} and {j}: L*d = {product} < 2")]
    CertificateViolated { i: usize, j: usize, product: f64 },
    #[error("exact cover limited to {limit} conflicted vertices, graph has {vertices}; use the greedy cover")]
    CoverLimit { vertices: usize, limit: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
