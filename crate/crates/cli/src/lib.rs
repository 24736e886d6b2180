//! Command-line front end: builds a family, runs one command and renders its
//! document as JSON or CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 certification failure, 3 resource
//! guard (order guard, traversal budget or round limit).

pub mod args;
pub mod commands;
mod render;

use std::fmt;

pub use args::{Cli, Command, Format};
pub use commands::{cmd_certify, cmd_exact, cmd_families, cmd_pc, cmd_run, cmd_scan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERT_FAIL: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub(crate) fn internal(message: impl Into<String>) -> Self {
        Self::usage(message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<bootperc::Error> for CliError {
    fn from(e: bootperc::Error) -> Self {
        use bootperc::Error::*;
        let code = match e {
            OrderGuard { .. } | BudgetExceeded { .. } | RoundLimit { .. } => EXIT_GUARD,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Rendered document and the exit code it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

/// Runs the parsed command on a pool of `cli.workers` threads.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::usage("--workers must be positive"));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::internal(e.to_string()))?;
    pool.install(|| dispatch(&cli.command, cli.format))
}

fn dispatch(command: &Command, format: Format) -> Result<Outcome, CliError> {
    let ok = |body| {
        Ok(Outcome {
            code: EXIT_OK,
            body,
        })
    };
    match command {
        Command::Run(a) => {
            let doc = cmd_run(a)?;
            ok(match format {
                Format::Json => render::json(&doc)?,
                Format::Csv => render::run_csv(&doc)?,
            })
        }
        Command::Scan(a) => {
            let doc = cmd_scan(a)?;
            ok(match format {
                Format::Json => render::json(&doc)?,
                Format::Csv => render::scan_csv(&doc)?,
            })
        }
        Command::Pc(a) => {
            let doc = cmd_pc(a)?;
            ok(match format {
                Format::Json => render::json(&doc)?,
                Format::Csv => render::pc_csv(&doc)?,
            })
        }
        Command::Certify(a) => {
            let doc = cmd_certify(a)?;
            let body = match format {
                Format::Json => render::json(&doc)?,
                Format::Csv => render::certify_csv(&doc)?,
            };
            let code = if doc.passed { EXIT_OK } else { EXIT_CERT_FAIL };
            Ok(Outcome { code, body })
        }
        Command::Exact(a) => {
            let doc = cmd_exact(a)?;
            ok(match format {
                Format::Json => render::json(&doc)?,
                Format::Csv => render::exact_csv(&doc)?,
            })
        }
        Command::Families(a) => {
            let doc = cmd_families(a)?;
            ok(match format {
                Format::Json => render::json(&doc)?,
                Format::Csv => render::families_csv(&doc)?,
            })
        }
    }
}

/// Parses `args` (program name first), executes, and writes the document
/// to `--output` or returns it for stdout. Returns the exit code and the
/// text destined for stdout and stderr.
pub fn main_with<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match <Cli as clap::Parser>::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                (code, text, String::new())
            } else {
                (code, String::new(), text)
            };
        }
    };
    match execute(&cli) {
        Ok(out) => match &cli.output {
            Some(path) => match std::fs::write(path, &out.body) {
                Ok(()) => (out.code, String::new(), String::new()),
                Err(e) => (
                    EXIT_USAGE,
                    String::new(),
                    format!("error: cannot write {}: {e}\n", path.display()),
                ),
            },
            None => (out.code, out.body, String::new()),
        },
        Err(e) => (e.code, String::new(), format!("error: {e}\n")),
    }
}
