use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {message}")]
    Config {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },

    #[error("numeric failure: {0}")]
    Numeric(#[from] planewave::Error),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable form printed on stderr.
    pub fn to_json(&self) -> String {
        match self {
            CliError::Config { message, line, column } => json!({
                "error": "config",
                "message": message,
                "line": line,
                "column": column,
            }),
            CliError::Numeric(e) => json!({
                "error": "numeric",
                "kind": kind(e),
                "message": e.to_string(),
            }),
            CliError::Io(m) => json!({ "error": "io", "message": m }),
        }
        .to_string()
    }
}

fn kind(e: &planewave::Error) -> &'static str {
    use planewave::Error::*;
    match e {
        InvalidParameter(_) => "invalid_parameter",
        PreconditionViolated(_) => "precondition_violated",
        SolverFailure(_) => "solver_failure",
        InsufficientData { .. } => "insufficient_data",
        FitFailed(_) => "fit_failed",
        Degeneracy { .. } => "degeneracy",
        NonConvergence { .. } => "non_convergence",
        Stiffness { .. } => "stiffness",
        NoCrossing { .. } => "no_crossing",
        Domain(_) => "domain",
        Serialization(_) => "serialization",
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
