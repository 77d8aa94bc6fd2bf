//! File formats, parallel drivers and the command-line front end for
//! [`qmeta_core`].

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod landscape;
pub mod output;
pub mod parallel;
pub mod suite;

pub use error::CliError;

/// Version string echoed into every run directory.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
