use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input: malformed graph, out-of-domain parameter, violated precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An enumeration cap was exceeded before any work was done.
    #[error("{what}: size {got} exceeds cap {cap}")]
    Cap {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    /// A work budget ran out part way through.
    #[error("{what}: budget of {budget} exhausted")]
    Budget { what: &'static str, budget: u64 },

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Cap { .. } | Error::Budget { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
