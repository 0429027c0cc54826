use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate channel: sideband energy is exactly zero")]
    DegenerateChannel,

    #[error("branch point: channel energy {energy} equals the barrier height; perturb the incident energy")]
    BranchPoint { energy: f64 },

    #[error("channel {order} is closed (E_n = {energy} <= 0)")]
    ChannelClosed { order: i32, energy: f64 },

    #[error("operation requires a rectangular barrier")]
    NotRectangular,

    #[error("singular matching system (reciprocal condition {rcond:e})")]
    SingularSystem { rcond: f64 },

    #[error("degenerate quantity: {0}")]
    Degenerate(&'static str),

    #[error("division by zero modulation amplitude")]
    ZeroModulation,

    #[error("unsupported potential topology: {0}")]
    UnsupportedTopology(String),

    #[error("quadrature did not converge (estimated relative error {estimate:e})")]
    Accuracy { estimate: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("time stepping unstable: norm drift {drift:e}")]
    Stability { drift: f64 },

    #[error("wave packet reached the grid boundary (edge density {density:e} at step {step})")]
    Window { density: f64, step: usize },

    #[error("insufficient transmission: transmitted weight {weight:e}")]
    InsufficientTransmission { weight: f64 },

    #[error("ensemble has no usable transmitted paths")]
    EmptyEnsemble,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
