//! Command-line front end: argument parsing, input loading, dispatch and
//! report rendering. [`run`] does everything except touching stdout, so it
//! can be driven from tests.

mod args;
mod commands;
mod input;
mod lls;
mod render;

use std::fmt;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

pub use args::{Cli, Format};

/// Identifies the envelope layout; bumped on incompatible changes.
pub const SCHEMA_VERSION: &str = "lglab.report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

/// Bad input, reported with the flag or field it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for InputError {}

/// A flat table for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// What a subcommand hands back to the dispatcher.
pub(crate) struct Payload {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    /// Some check in the results failed.
    pub failed: bool,
    pub table: Option<Table>,
}

impl Payload {
    pub fn new(command: &'static str, config: Value, results: impl Serialize) -> Result<Self, InputError> {
        Ok(Self {
            command,
            config,
            results: to_value(results)?,
            warnings: Vec::new(),
            failed: false,
            table: None,
        })
    }

    pub fn failed_if(mut self, failed: bool) -> Self {
        self.failed = failed;
        self
    }
}

pub(crate) fn to_value(x: impl Serialize) -> Result<Value, InputError> {
    serde_json::to_value(x).map_err(|e| InputError::new("output", e))
}

/// The report envelope shared by every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: &'static str,
    pub config: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub status: i32,
    pub report: Option<Report>,
    /// Rendered report (or help text).
    pub output: String,
    /// Message for standard error.
    pub error: Option<String>,
    /// The report went to `--out` rather than standard output.
    pub written_to_file: bool,
}

/// Parses `argv` (including the program name), runs the subcommand and
/// writes the report to `--out` when given.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT_ERROR,
            };
            return Outcome {
                status,
                report: None,
                output: if status == EXIT_OK { e.to_string() } else { String::new() },
                error: (status != EXIT_OK).then(|| e.to_string()),
                written_to_file: false,
            };
        }
    };
    let start = Instant::now();
    match execute(&cli, start) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            status: EXIT_INPUT_ERROR,
            report: None,
            output: String::new(),
            error: Some(format!("error: {e}")),
            written_to_file: false,
        },
    }
}

fn execute(cli: &Cli, start: Instant) -> Result<Outcome, InputError> {
    let payload = commands::dispatch(&cli.command)?;
    if cli.format == Format::Csv && payload.table.is_none() {
        return Err(InputError::new(
            "--format",
            format!("csv output is only available for census tables, not for `{}`", payload.command),
        ));
    }
    let status = if payload.failed { EXIT_VERIFICATION_FAILED } else { EXIT_OK };
    let report = Report {
        schema: SCHEMA_VERSION,
        tool: "lglab",
        version: env!("CARGO_PKG_VERSION"),
        command: payload.command.to_string(),
        status: if payload.failed { "failed" } else { "ok" },
        config: payload.config,
        results: payload.results,
        warnings: payload.warnings,
        timing_ms: cli.timing.then(|| start.elapsed().as_millis()),
    };
    let output = match cli.format {
        Format::Json => render::json(&report)?,
        Format::Csv => render::csv(payload.table.as_ref().expect("checked above"))?,
        Format::Table => render::table(&report),
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &output).map_err(|e| InputError::new("--out", format!("{}: {e}", path.display())))?;
    }
    Ok(Outcome {
        status,
        report: Some(report),
        output,
        error: None,
        written_to_file: cli.out.is_some(),
    })
}
