//! Batch front end for the field-sensing toolkit.
//!
//! ```text
//! eit-sensor <spectrum|fisher|dc|ac|cavity> --config <path> [--out <dir>] [--seed <u64>] [--points <n>]
//! ```
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad usage, unknown
//! or invalid keys, precondition violations), 3 on model or I/O failures at
//! run time.

// validation deliberately writes `!(x > y)` so NaN fails the check too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use commands::Flags;
use config::Config;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Model(eit_sensor::Error),
    Io(std::io::Error),
}

impl From<eit_sensor::Error> for CliError {
    fn from(e: eit_sensor::Error) -> Self {
        // precondition violations surfaced by constructors are configuration
        // problems; everything else is a runtime model failure
        match e {
            eit_sensor::Error::InvalidParameter(_) | eit_sensor::Error::InvalidRange(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Model(other),
        }
    }
}

impl From<String> for CliError {
    fn from(message: String) -> Self {
        CliError::Config(message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

const USAGE: &str = "usage: eit-sensor <spectrum|fisher|dc|ac|cavity> --config <path> \
                     [--out <dir>] [--seed <u64>] [--points <n>]";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("configuration error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Model(e)) => {
            eprintln!("model error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Config(USAGE.into()));
    };
    let mut config_path: Option<PathBuf> = None;
    let mut out_dir = PathBuf::from(".");
    let mut seed: Option<u64> = None;
    let mut points: Option<usize> = None;

    let mut i = 1;
    while i < args.len() {
        let flag = args[i].as_str();
        let value = args
            .get(i + 1)
            .ok_or_else(|| CliError::Config(format!("{flag} needs a value\n{USAGE}")));
        match flag {
            "--config" => config_path = Some(PathBuf::from(value?)),
            "--out" => out_dir = PathBuf::from(value?),
            "--seed" => {
                seed = Some(
                    value?
                        .parse::<u64>()
                        .map_err(|_| CliError::Config("--seed needs an unsigned integer".into()))?,
                )
            }
            "--points" => {
                points = Some(value?.parse::<usize>().map_err(|_| {
                    CliError::Config("--points needs a non-negative integer".into())
                })?)
            }
            other => {
                return Err(CliError::Config(format!("unknown flag `{other}`\n{USAGE}")));
            }
        }
        i += 2;
    }

    let config_path =
        config_path.ok_or_else(|| CliError::Config(format!("--config is required\n{USAGE}")))?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = Config::parse(&text).map_err(CliError::Config)?;
    let flags = Flags {
        out_dir,
        seed,
        points,
    };

    match command.as_str() {
        "spectrum" => commands::cmd_spectrum(cfg, &flags),
        "fisher" => commands::cmd_fisher(cfg, &flags),
        "dc" => commands::cmd_dc(cfg, &flags),
        "ac" => commands::cmd_ac(cfg, &flags),
        "cavity" => commands::cmd_cavity(cfg, &flags),
        other => Err(CliError::Config(format!(
            "unknown command `{other}`\n{USAGE}"
        ))),
    }
}
