use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource limit exceeded: {what} = {value} (limit {limit})")]
    ResourceLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("non-finite meta-loss at epoch {epoch}, batch {batch}, graph {graph}")]
    NonFinite {
        epoch: usize,
        batch: usize,
        graph: String,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
