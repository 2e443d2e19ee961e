//! Scenario-driven front end: TOML configuration, pipelines, CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

pub use config::Scenario;
pub use error::CliError;
pub use pipeline::{run, Command, Outcome, RunContext};
