//! Library side of the `svpn` command-line runner: configuration loading,
//! log/metrics export and the subcommands.

pub mod app;
pub mod config;
pub mod export;
