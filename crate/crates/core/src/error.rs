use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition (other than a plain domain check) does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A size or time guard was exceeded.
    #[error("guard exceeded: {param} = {value} (limit {limit})")]
    Guard {
        param: &'static str,
        value: f64,
        limit: f64,
    },

    /// An iteration failed to converge.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// A bracket that should contain exactly one root does not.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// A result failed its accuracy contract.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Work budget (panels, terms) exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Fitting input is degenerate.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Zero-cache I/O or parse failure.
    #[error("cache error: {0}")]
    Cache(String),
}

impl WeylError {
    pub(crate) fn guard(param: &'static str, value: f64, limit: f64) -> Self {
        WeylError::Guard { param, value, limit }
    }
}

impl From<std::io::Error> for WeylError {
    fn from(e: std::io::Error) -> Self {
        WeylError::Cache(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, WeylError>;
