//! Front end for the `mla` binary: configuration parsing and subcommands.

pub mod commands;
pub mod config;

pub use commands::{dispatch, CliError};
pub use config::{parse_config, parse_overrides, CliConfig, Command, ConfigError};
