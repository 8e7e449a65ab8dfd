//! Command-line front end: configuration resolution and subcommands.

pub mod commands;
pub mod config;
mod output;

pub use commands::dispatch;
pub use config::{parse_config, Cli, Command, ConfigError, RunConfig, Task};
pub use output::write_atomic;
