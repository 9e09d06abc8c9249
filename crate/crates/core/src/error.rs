use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure categories of the simulation kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    Domain(String),
    /// A linear system could not be solved.
    Singular { pivot: f64, column: usize },
    /// The adaptive integrator could not make progress.
    StepSizeUnderflow { time: f64, step: f64 },
    /// Array shapes or sampling grids do not line up.
    Shape(String),
    /// A requested window lies outside the available data.
    Range(String),
    /// A series is sampled too coarsely for the requested analysis.
    Resolution(String),
    /// Not enough usable data for a fit.
    Fit(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Singular { pivot, column } => {
                write!(f, "singular linear system: pivot {pivot:e} in column {column}")
            }
            Error::StepSizeUnderflow { time, step } => {
                write!(f, "integration failed at t = {time:e} s: step size {step:e} s underflowed")
            }
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Range(m) => write!(f, "range error: {m}"),
            Error::Resolution(m) => write!(f, "resolution error: {m}"),
            Error::Fit(m) => write!(f, "fit error: {m}"),
        }
    }
}

impl core::error::Error for Error {}
