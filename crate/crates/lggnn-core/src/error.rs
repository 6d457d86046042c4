//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors reported by samplers, estimators, solvers, and metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside its documented domain.
    Parameter(String),
    /// The requested exact computation is not defined for this model family.
    UnsupportedModel(String),
    /// Moment order outside the supported 2..=8 range.
    UnsupportedOrder(usize),
    /// A pair filter or split accepted no data.
    EmptyData(String),
    /// Linear system is singular (e.g. duplicated eigenvalues passed un-merged).
    SingularSystem(String),
    /// A metric needs both classes (or true probabilities) and one is missing.
    MissingClass(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::UnsupportedModel(msg) => write!(f, "unsupported model: {msg}"),
            Error::UnsupportedOrder(k) => {
                write!(f, "unsupported moment order {k} (supported range is 2..=8)")
            }
            Error::EmptyData(msg) => write!(f, "empty data: {msg}"),
            Error::SingularSystem(msg) => write!(f, "singular system: {msg}"),
            Error::MissingClass(msg) => write!(f, "missing class: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
