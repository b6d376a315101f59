//! Command-line front end: argument and config-file handling plus the four
//! subcommands. The `lemon` binary is a thin wrapper around [`parse_args`]
//! and [`run`].

pub mod args;
mod commands;
pub mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::process::ExitCode;

use clap::Parser;

pub use args::Cli;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

/// A failure with the exit code it maps to. Messages go to stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INFEASIBLE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<lemon::Error> for CliError {
    fn from(e: lemon::Error) -> Self {
        use lemon::Error::*;
        let code = match e {
            Io(_) | Parse { .. } | Csv(_) | Json(_) | EmptyGraph | NoCommunities => EXIT_INPUT,
            InvalidParameter(_) | EmptySeeds | VertexOutOfRange { .. } | NoTriangle | NotEnoughMembers { .. } => {
                EXIT_USAGE
            }
            _ => EXIT_INFEASIBLE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Why parsing stopped: a clap error (including `--help`, which clap reports
/// as an error that belongs on stdout) or a config-file problem.
#[derive(Debug)]
pub enum ArgsError {
    Clap(clap::Error),
    Config(CliError),
}

impl ArgsError {
    /// Prints the message where it belongs and returns the exit code.
    pub fn report(&self) -> u8 {
        match self {
            ArgsError::Clap(e) => {
                let _ = e.print();
                if e.use_stderr() {
                    EXIT_USAGE
                } else {
                    EXIT_OK
                }
            }
            ArgsError::Config(e) => {
                eprintln!("error: {e}");
                e.code
            }
        }
    }
}

/// Parses `argv` (program name first), filling absent flags from the
/// `--config` file if one is named.
pub fn parse_args<I, T>(argv: I) -> Result<Cli, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Some(path) = config::config_path(&argv) {
        let entries = config::read_config(path.as_ref()).map_err(ArgsError::Config)?;
        argv = config::merge(argv, &entries).map_err(ArgsError::Config)?;
    }
    Cli::try_parse_from(argv).map_err(ArgsError::Clap)
}

pub fn init_logging(cli: &Cli) {
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, 2) => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("LEMON_LOG")
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    commands::dispatch(cli.command)
}

/// Full entry point: parse, set up logging, run, map to an exit code.
pub fn main_with<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match parse_args(argv) {
        Ok(cli) => cli,
        Err(e) => return ExitCode::from(e.report()),
    };
    init_logging(&cli);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.code)
        }
    }
}
