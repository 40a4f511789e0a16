use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    /// Coherent amplitude too large for the truncated basis.
    #[error("truncation unsafe: |alpha|^2 = {norm_sqr:.4} must be below {bound:.4}")]
    TruncationUnsafe { norm_sqr: f64, bound: f64 },

    /// Weight in the top Fock levels exceeded the configured tolerance.
    #[error("truncation overflow: tail weight {tail:.3e} above tolerance {tolerance:.3e}")]
    TruncationOverflow { tail: f64, tolerance: f64 },

    /// The density operator lost positivity; the caller should halve dt.
    #[error("step-size failure at t = {time}: smallest eigenvalue {min_eigenvalue:.3e}")]
    StepSizeFailure { min_eigenvalue: f64, time: f64 },

    #[error(
        "grid does not cover the state; suggested x in [{x_lo:.4}, {x_hi:.4}], p in [{p_lo:.4}, {p_hi:.4}]"
    )]
    GridCoverage { x_lo: f64, x_hi: f64, p_lo: f64, p_hi: f64 },

    #[error("history budget exceeded: {required} decoherence-matrix entries, budget {budget}")]
    HistoryBudget { required: u64, budget: u64 },

    #[error("decoherence time undefined: {0}")]
    UndefinedDecoherenceTime(&'static str),

    #[error("invalid cell grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn overflow(msg: impl Into<String>) -> Self {
        Error::NumericalOverflow(msg.into())
    }
}
