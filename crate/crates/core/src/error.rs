use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("linear solver failure: {0}")]
    SolverFailure(String),

    #[error("insufficient data: need at least {needed} usable coefficients, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("eigenvalue {index} belongs to an unresolved cluster of size {cluster_size}")]
    Degeneracy { index: usize, cluster_size: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { iterations: usize, history: Vec<f64> },

    #[error("step size underflow at y = {y} (h = {step:e}, |state| = {state_norm:e})")]
    Stiffness { y: f64, step: f64, state_norm: f64 },

    #[error("level {level} is never reached by the trajectory")]
    NoCrossing { level: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
