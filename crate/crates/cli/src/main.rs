mod cli;
mod commands;
mod render;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command, Format};

#[derive(Debug)]
pub enum CliError {
    Core(expander_core::Error),
    Io(String),
    Usage(String),
}

impl From<expander_core::Error> for CliError {
    fn from(e: expander_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(expander_core::Error::Resource(_)) => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let outcome = commands::execute(&cli.command, &cli.global)?;
    let default = match cli.command {
        Command::Gen { .. } => Format::Text,
        _ => Format::Json,
    };
    let format = cli.global.format.unwrap_or(default);
    let config = serde_json::to_value(cli).expect("config serializes");
    let text = render::render(&outcome, format, config)?;
    match &cli.global.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
