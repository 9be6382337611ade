use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// `|f(z)|` is beyond the floating range; the log-modulus is still known.
    #[error("value overflows the floating range (log-modulus {log_modulus})")]
    Overflow { log_modulus: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch continuation failed: {0}")]
    Continuation(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
