//! Experiment driver behind the `twistlat` binary.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod manifest;

pub use commands::{exit_code, run, Command, Outcome};
pub use config::RunConfig;
pub use manifest::RunManifest;
