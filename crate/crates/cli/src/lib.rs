//! Command-line front end and HTTP service for `confound-core`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod service;

use std::io::Write;

use args::{Cli, Command};
use error::CliError;

/// Runs a parsed command, writing primary output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Balance(a) => commands::balance(&a, stdout),
        Command::Simulate(a) => commands::simulate(&a, stdout),
        Command::Match(a) => commands::match_pools(&a, stdout),
        Command::Serve(a) => {
            if a.workers == 0 {
                return Err(CliError::usage("--workers must be at least 1"));
            }
            let options = service::ServiceOptions {
                workers: a.workers,
                max_replicates: a.max_replicates,
                cors: a.cors,
            };
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| CliError::data(e.to_string()))?;
            runtime
                .block_on(service::serve(a.bind, options))
                .map_err(|e| CliError::data(format!("cannot serve on {}: {e}", a.bind)))
        }
    }
}
