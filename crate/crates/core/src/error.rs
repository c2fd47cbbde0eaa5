use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain on which the model is defined.
    #[error("{0}")]
    Domain(String),

    /// A derivative was requested exactly at a kink of the welfare function.
    #[error("derivative undefined at region boundary theta = {theta}")]
    Boundary { theta: f64 },

    /// An iterative procedure ran out of iterations.
    #[error("no convergence after {iterations} iterations (last gap {gap:e})")]
    Convergence { iterations: usize, gap: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
