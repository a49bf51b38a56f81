use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("SDR solver did not converge after {iterations} iterations (gap {gap:.3e}, primal infeasibility {pinf:.3e}, dual infeasibility {dinf:.3e})")]
    SolverFailure {
        iterations: usize,
        gap: f64,
        pinf: f64,
        dinf: f64,
    },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("range error in field `{field}`: {reason}")]
    Range { field: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
