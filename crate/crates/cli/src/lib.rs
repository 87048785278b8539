//! Library side of the `gammasum` command: job descriptions, evaluation and
//! output formatting.

pub mod args;
pub mod exec;
pub mod job;
pub mod output;

use std::io::Write;

pub use exec::{execute, RunError, Table};
pub use job::{parse_config, parse_config_str, Command, Format, Grid, GridUnit, JobSpec, ParseError};

/// Runs a job, writing to `job.output` or `stdout`.
pub fn run_to(job: &JobSpec, stdout: &mut dyn Write) -> Result<(), RunError> {
    let table = execute(job)?;
    let text = output::render(job, &table);
    match &job.output {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a job and maps the outcome to an exit code, reporting errors on
/// standard error.
pub fn run(job: &JobSpec) -> i32 {
    match run_to(job, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
