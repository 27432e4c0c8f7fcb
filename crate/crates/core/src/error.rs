use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// One or more invalid input values. Every problem found is listed.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// The scenario cannot be simulated (e.g. a job nobody is assigned to).
    #[error("setup error: {0}")]
    Setup(String),

    /// An engine reached a state its invariants forbid.
    #[error("internal consistency fault: {0}")]
    Consistency(String),

    /// An agent received a trigger its state chart has no edge for.
    #[error("state chart violation: {agent} in state {state} cannot handle {trigger}")]
    StateChart {
        agent: String,
        state: String,
        trigger: String,
    },

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {message}")]
    Parse { what: String, message: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(vec![msg.into()])
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
