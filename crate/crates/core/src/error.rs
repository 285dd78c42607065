use thiserror::Error;

/// Errors surfaced by the simulation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A query reached past the time horizon a clock field was built for.
    #[error("time {requested} outside [0, {horizon}]")]
    Range { requested: f64, horizon: f64 },

    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input violated a documented precondition (e.g. unordered positions).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Asymptotic formulas are undefined when an influence time equals alpha.
    #[error("degenerate scaling: alpha_i = {alpha_i} must exceed alpha = {alpha}")]
    Degenerate { alpha: f64, alpha_i: f64 },

    /// Label or time lookup outside the recorded trajectory.
    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
