//! The JSON report envelope shared by every subcommand.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "alab-report/1";

/// Errors caused by bad invocations or malformed configs; these exit
/// with code 2, like argument-parsing failures.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// What a command produced: a payload, an optional verdict, and an
/// optional raw body (used by the CSV emitters) that bypasses the JSON
/// envelope.
pub struct CommandOutput {
    pub command: String,
    pub payload: Value,
    pub verdict: Option<Verdict>,
    pub raw: Option<String>,
}

impl CommandOutput {
    pub fn json(command: impl Into<String>, payload: Value) -> Self {
        CommandOutput {
            command: command.into(),
            payload,
            verdict: None,
            raw: None,
        }
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = Some(verdict);
        self
    }

    pub fn raw(command: impl Into<String>, body: String) -> Self {
        CommandOutput {
            command: command.into(),
            payload: Value::Null,
            verdict: None,
            raw: Some(body),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: &'static str,
    command: &'a str,
    timing_ms: u128,
    payload: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: &'a Option<Verdict>,
}

pub fn finish(
    result: anyhow::Result<CommandOutput>,
    out: &Option<std::path::PathBuf>,
    started: Instant,
) -> ExitCode {
    match result {
        Ok(output) => {
            let body = match &output.raw {
                Some(raw) => raw.clone(),
                None => {
                    let report = Report {
                        schema_version: SCHEMA_VERSION,
                        command: &output.command,
                        timing_ms: started.elapsed().as_millis(),
                        payload: &output.payload,
                        verdict: &output.verdict,
                    };
                    serde_json::to_string_pretty(&report).expect("serializable report")
                }
            };
            if let Err(e) = write_out(out.as_deref(), &body) {
                eprintln!("alab: cannot write output: {e}");
                return ExitCode::from(1);
            }
            match output.verdict {
                Some(Verdict::Fail) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("alab: {e}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn write_out(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{body}\n")),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}
