use thiserror::Error;

/// Errors raised by the numerical kernels and the sweep driver.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A formula was asked for outside the regime it covers (for example the
    /// multi-level asymptote at two levels).
    #[error("unsupported regime: {0}")]
    Regime(String),

    /// Invalid RIS configuration or request.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An adaptive integration did not reach its tolerance within budget.
    /// `last` and `previous` carry the last two partial results (or the
    /// estimate and its error bound for a single adaptive pass).
    #[error("{context} failed to converge (last = {last:e}, previous = {previous:e})")]
    Convergence {
        context: &'static str,
        last: f64,
        previous: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
