//! `shearadon`: batch front-end for the group checks, Radon transforms and
//! shearlet transforms.
//!
//! Exit codes: 0 when every reported metric is within tolerance, 2 when a
//! tolerance check fails, 1 on usage, parse or IO errors.

mod args;
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use crate::args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{module}: {source}")]
    Library {
        module: &'static str,
        #[source]
        source: shearadon::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Tags a library error with the module that raised it.
pub trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> InModule<T> for shearadon::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Library { module, source })
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            if let Err(e) = report.emit(cli.job().report.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for row in report.failures() {
                    match row.tolerance {
                        Some(t) => eprintln!("tolerance failure: {} = {} exceeds {t}", row.metric, row.value),
                        None => eprintln!("check failed: {} = {}", row.metric, row.value),
                    }
                }
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
