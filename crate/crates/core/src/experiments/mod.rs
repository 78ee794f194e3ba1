//! Experiment drivers behind the `ridgelet` binary and the crate examples.

mod check;
mod commands;
mod config;
mod manifest;

pub use check::{cmd_check, self_check, CheckResult};
pub use commands::*;
pub use config::*;
pub use manifest::*;
