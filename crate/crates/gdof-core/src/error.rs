use std::fmt;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid antenna counts, exponent ordering, or operation preconditions.
    InvalidConfig(String),
    /// An exponent sits exactly on a regime boundary (alpha = 1).
    RegimeBoundary(String),
    /// Factorization or conditioning failure that jitter could not fix.
    Numerical(String),
    /// Random construction failed its rank/conditioning rejection test.
    Degenerate(String),
    /// A rate class has no finite bound; the constraint catalog is incomplete.
    Unbounded(String),
    /// Requested enumeration exceeds the state-space cap.
    TooLarge(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            Error::RegimeBoundary(m) => write!(f, "regime boundary: {m}"),
            Error::Numerical(m) => write!(f, "numerical failure: {m}"),
            Error::Degenerate(m) => write!(f, "degenerate construction: {m}"),
            Error::Unbounded(m) => write!(f, "unbounded rate: {m}"),
            Error::TooLarge(m) => write!(f, "state space too large: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
