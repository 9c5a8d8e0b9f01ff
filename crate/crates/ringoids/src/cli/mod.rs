//! Batch interface: `validate`, `check <suite>` and `report` over JSON document bundles.
//!
//! Exit codes: 0 every check passed, 1 a mathematical check failed, 2 invalid input,
//! 3 an I/O failure.

pub mod doc;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::AlgError;
use crate::tensor::{FlatMethod, SearchOptions};

pub use doc::{parse_bundle, Store, SCHEMA};
pub use suites::{Ctx, Entry, Status, Suite};

pub const REPORT_SCHEMA: &str = "ringoids-report/1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ringoids",
    version,
    about = "Exact checks for modules over finite ringoids and their diagrams"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Generator bound for skeleta and purity test families.
    #[arg(long, global = true, default_value_t = 2)]
    generators: usize,
    /// Largest number of submodules or test objects a single search may visit.
    #[arg(long, global = true, default_value_t = 4096)]
    budget: usize,
    /// Flatness method: exactness, fiber, summand or all.
    #[arg(long, global = true, default_value = "all")]
    method: String,
    /// Seed for the randomized test families; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path; `-` writes to standard output.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Record elapsed time per check. Reports are then no longer byte-reproducible.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run the structural validators on every document.
    Validate { files: Vec<PathBuf> },
    /// Run one check suite: flat, pure, cartesian, yoneda, rep-theorem or appendix-a.
    Check { suite: String, files: Vec<PathBuf> },
    /// Run validation and every suite; writes report.json unless --out is given.
    Report { files: Vec<PathBuf> },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(CliError::Invalid(m)) => {
            eprintln!("error: {m}");
            EXIT_INVALID
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            EXIT_IO
        }
    }
}

enum CliError {
    Invalid(String),
    Io(String),
}

impl From<AlgError> for CliError {
    fn from(e: AlgError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let method: FlatMethod = cli.method.parse()?;
    let (command, files, suites, default_out): (String, &[PathBuf], Vec<Suite>, &str) =
        match &cli.cmd {
            Cmd::Validate { files } => ("validate".into(), files, vec![Suite::Validate], "-"),
            Cmd::Check { suite, files } => {
                let s = Suite::parse(suite)
                    .filter(|s| *s != Suite::Validate)
                    .ok_or_else(|| CliError::Invalid(format!("unknown suite '{suite}'")))?;
                (format!("check {suite}"), files, vec![s], "-")
            }
            Cmd::Report { files } => (
                "report".into(),
                files,
                std::iter::once(Suite::Validate)
                    .chain(Suite::CHECKS)
                    .collect(),
                "report.json",
            ),
        };
    let mut hasher = Sha256::new();
    let mut docs = Vec::new();
    for f in files {
        let bytes = std::fs::read(f).map_err(|e| CliError::Io(format!("{}: {e}", f.display())))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::Invalid(format!("{}: not UTF-8", f.display())))?;
        let bundle =
            parse_bundle(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", f.display())))?;
        docs.extend(bundle.documents);
    }
    let store = Store::load(&docs)?;
    let opts = SearchOptions {
        budget: cli.budget,
        seed: cli.seed,
        generators: cli.generators,
        ..SearchOptions::default()
    };
    let mut ctx = Ctx::new(&store, opts, method, cli.timings);
    for s in suites {
        ctx.run(s);
    }
    let mut entries = std::mem::take(&mut ctx.entries);
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
    let summary = json!({
        "pass": count(Status::Pass),
        "fail": count(Status::Fail),
        "skipped": count(Status::Skipped),
        "not-applicable": count(Status::NotApplicable),
    });
    let failed = count(Status::Fail) > 0;
    let report = json!({
        "schema": REPORT_SCHEMA,
        "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
        "command": command,
        "input_digest": format!("sha256:{}", hex::encode(hasher.finalize())),
        "documents": docs.len(),
        "options": {
            "generators": cli.generators,
            "budget": cli.budget,
            "method": method,
            "seed": cli.seed,
        },
        "summary": summary,
        "checks": entries,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let out = cli.out.as_deref().unwrap_or(default_out);
    if out == "-" {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    } else {
        std::fs::write(out, text).map_err(|e| CliError::Io(format!("{out}: {e}")))?;
    }
    Ok(if failed { EXIT_FAIL } else { EXIT_PASS })
}
