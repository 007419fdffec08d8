mod args;
mod commands;
mod error;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use error::CliError;
use pq_osc_core::susy::EntangledKind;

fn emit_error(kind: &str, message: &str) {
    let record = json!({ "error": kind, "message": message });
    eprintln!("{record}");
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PQ_OSC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::ConfigInvalid {
            field: "PQ_OSC_THREADS".into(),
            message: format!("expected a positive integer, got `{raw}`"),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Output(e.to_string()))
}

/// Runs the command; `Ok(false)` means rows carried errors or failures.
fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (table, format, out) = match &cli.command {
        Command::Numbers(c) => (commands::numbers(c)?, c.format, &c.out),
        Command::Exp(c) => (commands::exp(c)?, c.format, &c.out),
        Command::Spectrum(c) => (commands::spectrum(c)?, c.format, &c.out),
        Command::Uncertainty(c) => (commands::uncertainty(c)?, c.format, &c.out),
        Command::Concurrence(c) => (
            commands::concurrence_table(c, EntangledKind::from(c.kind))?,
            c.format,
            &c.out,
        ),
        Command::Sweep { quantity, common } => (commands::sweep(*quantity, common)?, common.format, &common.out),
        Command::Verify { suite, format, out } => (commands::verify(suite)?, *format, out),
    };
    let metadata = json!({
        "tool": "pq-osc",
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cli).map_err(|e| CliError::Output(e.to_string()))?,
    });
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    table.write(&mut *sink, format, metadata)?;
    sink.flush()?;
    Ok(!table.has_errors())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            emit_error("ConfigInvalid", first);
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            emit_error("RowErrors", "one or more rows reported an error or failed suite");
            ExitCode::from(1)
        }
        Err(e) => {
            emit_error(e.kind(), &e.to_string());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
