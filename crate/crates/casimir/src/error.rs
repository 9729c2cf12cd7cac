use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("numerical failure: {message} (partial value {partial:e}, error bound {bound:e})")]
    Numerical { message: String, partial: f64, bound: f64 },
    #[error("no convergence after {steps} steps, best estimate {best:e}")]
    Convergence { best: f64, steps: usize },
    #[error("precision insufficient: estimated cancellation {loss:e} of the result")]
    Precision { loss: f64 },
    #[error("ill-conditioned fit: condition number {0:e}")]
    IllConditioned(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
