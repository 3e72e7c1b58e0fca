use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. `f_entropy(x)` with `x < 1/2`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Covariance matrix violates the uncertainty principle.
    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Numerical procedure failed to reach the requested accuracy.
    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("row {row} (x = {x}): {source}")]
    Row {
        row: usize,
        x: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
