use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeExceeded { what: &'static str, size: f64, limit: f64 },

    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("negative transition entry {value:e} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("fractional matching infeasible at level {level}: {msg}")]
    MatchingInfeasible { level: usize, msg: String },

    #[error("trial-state overlap squared {overlap_sq} stays above 1/2 up to theta = {theta}")]
    OverlapTooLarge { overlap_sq: f64, theta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_size(what: &'static str, size: f64, limit: f64) -> Result<()> {
    if size > limit {
        Err(Error::SizeExceeded { what, size, limit })
    } else {
        Ok(())
    }
}
