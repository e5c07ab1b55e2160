use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {context}: {dimension} expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        dimension: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite value in {context} at {location}")]
    NonFinite {
        context: &'static str,
        location: String,
    },
    #[error("invalid spectrum: {0}")]
    Spectrum(String),
    #[error("{0}")]
    Data(String),
    #[error("stale or missing activation cache: {0}")]
    Cache(&'static str),
}

impl Error {
    pub(crate) fn shape(
        context: &'static str,
        dimension: &'static str,
        expected: usize,
        actual: usize,
    ) -> Self {
        Error::Shape {
            context,
            dimension,
            expected,
            actual,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
