use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// u'(r) = 0 where the operator density is singular at the origin (m < 2).
    #[error("operator indeterminate at r = {r}: u'(r) = 0 and A(t) is singular at t = 0 (m = {m})")]
    Indeterminate { r: f64, m: f64 },

    #[error("empty parameter interval ({lo}, {hi})")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("tail metadata invalid: {0}")]
    TailMetadataInvalid(String),

    #[error("quadrature budget exceeded: error {achieved:e} exceeds budget {budget:e}")]
    BudgetExceeded { achieved: f64, budget: f64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("no certified amplitude found after {decades} decades (last amplitude {last_amplitude:e})")]
    NoAmplitudeFound { decades: u32, last_amplitude: f64 },

    #[error("degenerate denominator: qs = (m1-1)(m2-1)")]
    DegenerateDenominator,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
