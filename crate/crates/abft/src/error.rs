//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter fell outside its legal range. Names the field and both bounds.
    #[error("{field} = {value} outside [{min}, {max}]")]
    Range {
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    /// A scenario or scheme configuration is inconsistent.
    #[error("config error: {0}")]
    Config(String),
    /// A numerical procedure produced an unusable intermediate (non-finite or
    /// non-positive normalization, etc.).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The fixed-point solver ran out of iterations. Carries the last iterate.
    #[error(
        "fixed point did not converge after {iterations} iterations \
         (last pe = {last_pe}, last p_tr = {last_p_tr})"
    )]
    Convergence {
        iterations: u32,
        last_pe: f64,
        last_p_tr: f64,
    },
    /// Input byte sequence too short to contain the element.
    #[error("truncated input: need {needed} bytes, got {got}")]
    Truncated { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn range_u(field: &'static str, value: u64, min: u64, max: u64) -> Self {
        Error::Range {
            field,
            value: value as f64,
            min: min as f64,
            max: max as f64,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
