#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use cli::Cli;

/// Everything that ends a run early, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or values: exit 1.
    Usage(String),
    /// Rejected by the argument parser: exit 1.
    Parse(clap::Error),
    /// The numerics could not produce a result: exit 2.
    Numerical(dscale_core::Error),
    /// Reading or writing files failed: exit 2.
    Io(anyhow::Error),
}

impl From<dscale_core::Error> for Failure {
    fn from(e: dscale_core::Error) -> Self {
        match e {
            dscale_core::Error::InvalidArgument(msg) => Failure::Usage(msg),
            other => Failure::Numerical(other),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Parse(_) => 1,
            Failure::Numerical(_) | Failure::Io(_) => 2,
        }
    }

    fn report(&self) {
        match self {
            Failure::Usage(msg) => eprintln!("error: {msg}\n\nFor more information, try '--help'."),
            Failure::Parse(e) => {
                let _ = e.print();
                eprintln!("\n{}", Cli::command().render_help());
            }
            Failure::Numerical(e) => eprintln!("numerical failure: {e}"),
            Failure::Io(e) => eprintln!("I/O failure: {e:#}"),
        }
    }
}

fn run(args: Vec<std::ffi::OsString>) -> Result<(), Failure> {
    let args = cli::expand_config(args).map_err(Failure::Usage)?;
    let parsed = match Cli::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Ok(());
            }
            return Err(Failure::Parse(e));
        }
    };
    let command = &parsed.command;
    let outcome = commands::run(command)?;
    let out = command.output();
    let path = output::resolve_path(out.out.as_deref(), command.name(), out.format);
    let written = output::emit(&outcome.table, out.format, &path, &outcome.plots).map_err(Failure::Io)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("wrote {}", written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "));
    Ok(())
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.code())
        }
    }
}
