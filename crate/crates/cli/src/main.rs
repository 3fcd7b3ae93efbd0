//! `sesim` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments or config,
//! 3 a fit or solver did not converge (outputs are still written).
//! Worker threads follow `RAYON_NUM_THREADS`.

mod args;
mod commands;
mod config;
mod error;
mod plot;
mod values;

use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, OutputArgs};
use config::{resolve, saved_config, ConfigFile};
use error::{io_error, CliError, CliResult};

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sesim: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("JSON values serialize");
    s.push(b'\n');
    s
}

fn run(cli: Cli) -> CliResult<()> {
    if let Command::Plot(p) = &cli.command {
        return plot::run(p);
    }
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let out_defaults = OutputArgs { json: Some(false), quiet: Some(false), ..OutputArgs::default() };
    let output = resolve("output", &out_defaults, &cli.output, file.as_ref())?;
    let out = commands::run(&cli.command, file.as_ref())?;

    let output_value = serde_json::to_value(&output).expect("output section serializes");
    let config = saved_config(out.section, &out.config, &output_value, file.as_ref());
    let report = json!({
        "command": out.section,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "seed": out.seed,
        "results": out.results,
    });
    let report_bytes = pretty(&report);

    if let Some(path) = &cli.save_config {
        write_file(path, &pretty(&config))?;
    }
    if let Some(path) = &output.csv {
        match &out.csv {
            Some(bytes) => write_file(path, bytes)?,
            None => return Err(CliError::Config(format!("{} produces no CSV table; use --report", out.section))),
        }
    }
    if let Some(path) = &output.report {
        write_file(path, &report_bytes)?;
    }
    if !output.quiet.unwrap_or(false) {
        let bytes = match (&out.csv, output.json.unwrap_or(false)) {
            (Some(csv), false) => csv,
            _ => &report_bytes,
        };
        std::io::stdout().lock().write_all(bytes).map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    }
    match out.failure {
        Some(msg) => Err(CliError::Numerical(msg)),
        None => Ok(()),
    }
}
