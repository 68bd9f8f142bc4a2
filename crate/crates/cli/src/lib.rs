//! File formats and command line for `metric-margin-core`.
//!
//! * [`data`]: CSV/JSONL ingestion and label tables.
//! * [`model`]: versioned model JSON.
//! * [`cli`]: argument parsing and the subcommand drivers.

pub mod cli;
pub mod data;
pub mod error;
pub mod model;

pub use error::{CliError, Result};

/// Version of the training report layout.
pub const REPORT_SCHEMA: u64 = 1;
