//! Batch pipeline around `landfall-core`: configuration, stage runners,
//! artifact manifest and SVG report.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod svg;

pub use config::RunConfig;
pub use error::{CliError, CliResult, ErrorKind, Stage};
