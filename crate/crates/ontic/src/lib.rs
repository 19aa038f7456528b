//! Command-line driver for `ontic-core`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 verification
//! failure.

pub mod acceptance;
pub mod cli;
pub mod commands;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use cli::{Format, RunConfig, Task};
use error::{CliError, EXIT_SUCCESS, EXIT_VERIFICATION};
use report::OverlapReport;

/// Parses `args`, runs the requested command and returns its exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = cli::parse(args).and_then(|config| match config {
        Some(config) => execute(&config),
        None => Ok(EXIT_SUCCESS),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let text = e.to_string();
            if text.starts_with("error:") {
                eprint!("{text}");
            } else {
                eprintln!("error: {text}");
            }
            e.exit_code()
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(report: &OverlapReport, config: &RunConfig, sweep_csv: bool) -> Result<u8, CliError> {
    let mut out = sink(config.out.as_deref())?;
    match config.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv if sweep_csv => report.write_sweep_csv(&mut out)?,
        Format::Csv => report.write_verdicts_csv(&mut out)?,
    }
    out.flush()?;
    if !report.passed {
        for v in report.verdicts.iter().filter(|v| v.required && !v.pass) {
            eprintln!(
                "check failed: {} = {} (expected {:?} {} within {:e})",
                v.name, v.value, v.relation, v.expected, v.tolerance
            );
        }
    }
    Ok(if report.passed {
        EXIT_SUCCESS
    } else {
        EXIT_VERIFICATION
    })
}

/// Runs a validated configuration.
pub fn execute(config: &RunConfig) -> Result<u8, CliError> {
    match &config.task {
        Task::VerifyQuantum { settings, label } => {
            emit(&commands::verify_quantum(settings, label)?, config, false)
        }
        Task::KsModel {
            grid,
            tolerance,
            pairs,
        } => emit(
            &commands::ks_model_report(*grid, *tolerance, *pairs, config.seed)?,
            config,
            false,
        ),
        Task::Nogo { w, sweep } => emit(&commands::nogo_report(w, sweep)?, config, true),
        Task::Acceptance => {
            let results = acceptance::run_all(config.seed);
            {
                let mut stdout = io::stdout().lock();
                for r in &results {
                    writeln!(stdout, "{}", r.line())?;
                }
            }
            let report = acceptance::report(&results);
            if config.out.is_some() {
                emit(&report, config, false)
            } else {
                Ok(if report.passed {
                    EXIT_SUCCESS
                } else {
                    EXIT_VERIFICATION
                })
            }
        }
        Task::ExportModel { grid } => {
            commands::export_model(*grid, sink(config.out.as_deref())?)?;
            Ok(EXIT_SUCCESS)
        }
    }
}
