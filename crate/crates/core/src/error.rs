use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
///
/// Regime problems (a formula that does not apply for the given coefficients)
/// are kept apart from plain domain errors so callers can map them to
/// different exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid model parameters (`n = 0`, negative coefficients, `p <= 1`).
    InvalidParams(String),
    /// A formula was evaluated outside the coefficient regime where it is defined.
    Regime(String),
    /// An argument lies outside the domain of a function.
    Domain(String),
    /// Grid construction failed.
    Grid(String),
    /// Input arrays disagree in length.
    LengthMismatch { expected: usize, found: usize },
    /// `e^{σψ}` would overflow at a node carrying a non-negligible value.
    WeightOverflow { node: usize, exponent: f64 },
    /// Invalid run or check configuration.
    Config(String),
    /// Input data rejected by a checker (e.g. a non-monotone `g`).
    Input(String),
    /// Not enough data for a fit.
    Fit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
            Error::Regime(m) => write!(f, "regime error: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Grid(m) => write!(f, "grid error: {m}"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected} values, found {found}")
            }
            Error::WeightOverflow { node, exponent } => write!(
                f,
                "weight overflow at node {node}: exponent {exponent:.3} exceeds 600"
            ),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::Input(m) => write!(f, "input error: {m}"),
            Error::Fit(m) => write!(f, "fit error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
