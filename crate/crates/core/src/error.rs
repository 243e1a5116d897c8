use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: usize },

    #[error("root not bracketed on b in [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("precision bound is infinite: the heat capacity vanishes")]
    InfiniteBound,

    #[error("no convergence before t = {t_max}")]
    NonConvergence { t_max: f64 },

    #[error("step size underflow at t = {t}")]
    StepSize { t: f64 },

    #[error("Hilbert-space dimension {dim} exceeds the dense-oracle cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionCap { .. }
                | Error::Parse { .. }
                | Error::Capacity { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
