//! Command-line front end for the `switchrun` library: formula evaluation,
//! configured experiments, table reproduction and replayable run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod table;
pub mod tables;

pub use commands::{execute, CommandOutput, IntRange, Invocation, OutputFile, DEFAULT_SEED};
pub use error::{CliError, Result};
pub use manifest::{replay, write_run, ReplayOutcome, RunManifest};
pub use table::{Cell, Format, Table};
