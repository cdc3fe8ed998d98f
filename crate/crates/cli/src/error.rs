use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] tqe_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// A check suite ran to completion with failing checks.
    #[error("{failed} of {total} checks failed in suite {suite}")]
    ChecksFailed { suite: String, failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Usage(_) | CliError::Argument(_) | CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Argument(_) => "invalid_argument",
            CliError::Config(_) => "config",
            CliError::Model(tqe_core::Error::Truncation { .. }) => "truncation",
            CliError::Model(_) => "model",
            CliError::Io(_) => "io",
            CliError::ChecksFailed { .. } => "checks_failed",
        }
    }

    /// The machine-readable record written to stderr.
    pub fn record(&self) -> Value {
        let mut record = json!({ "error": self.kind(), "message": self.to_string() });
        let details = match self {
            CliError::Model(tqe_core::Error::Truncation { cutoff, tail, tolerance }) => {
                json!({ "cutoff": cutoff, "tail": tail, "tolerance": tolerance })
            }
            CliError::Model(tqe_core::Error::InvalidBracket { lo, hi }) => json!({ "lo": lo, "hi": hi }),
            CliError::Model(tqe_core::Error::DegenerateOutcome { k1, k2, y }) => json!({ "k1": k1, "k2": k2, "y": y }),
            CliError::ChecksFailed { suite, failed, total } => json!({ "suite": suite, "failed": failed, "total": total }),
            _ => Value::Null,
        };
        if !details.is_null() {
            record["details"] = details;
        }
        record
    }
}
