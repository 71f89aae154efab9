use thiserror::Error;

/// Library-wide error type. Resource exhaustion is always reported as
/// `Budget` so callers can distinguish "ran out of steps" from a genuinely
/// malformed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("step budget of {budget} exhausted while {context}")]
    Budget { budget: u64, context: String },

    #[error("plus side violates the block convention: 0 is not a member")]
    OmegaViolation,

    #[error("window determines no complete (alpha, beta) pair")]
    InsufficientData,

    #[error("finite pair list exhausted at pair {index}")]
    StreamExhausted { index: usize },

    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("certificate does not define L at D = {d}")]
    CertificateDomain { d: u64 },

    #[error("window [{lo}, {hi}] too large to materialize (cap {cap} bits)")]
    WindowTooLarge { lo: i64, hi: i64, cap: u64 },

    #[error("homomorphism is not surjective: generator images have gcd {gcd}")]
    NotSurjective { gcd: i64 },

    #[error("value out of supported range: {0}")]
    OutOfRange(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn budget(budget: u64, context: impl Into<String>) -> Self {
        Error::Budget { budget, context: context.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
