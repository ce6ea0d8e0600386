use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set describes a nonphysical device.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// The requested problem size exceeds what the dense routines will allocate.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The operation needs a homogeneous circuit (or another precondition the
    /// inputs do not meet).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Propagation lost unitarity beyond the configured tolerance.
    #[error("integration failure at step {step}: norm drift {drift:.3e} exceeds {tolerance:.1e}")]
    Integration {
        step: usize,
        drift: f64,
        tolerance: f64,
    },

    /// A least-squares fit could not be carried out.
    #[error("fit failure: {0}")]
    Fit(String),

    /// Requested coupling strength would leave the charging regime entirely.
    #[error("charging-limit violation: {0}")]
    ChargingLimit(String),

    /// An experiment configuration failed to parse or validate; one entry per
    /// offending field.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    /// Reading or writing result files failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
