//! `hklab`: scenario-driven heat-kernel experiments.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;
pub mod svg;
pub mod times;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{Format, Options, Outcome};
use crate::error::{exit, CliError};
use crate::times::TimeSpec;

#[derive(Debug, Parser)]
#[command(name = "hklab", version, about = "Heat kernels on weighted graphs: exact kernels against Gaussian upper bounds")]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Write into this directory instead of a fresh timestamped one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Time grid: `logspace:a:b:n` or a comma list; overrides the scenario.
    #[arg(long, allow_hyphen_values = true)]
    pub times: Option<TimeSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated statement ids; overrides the scenario.
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Common {
    fn options(&self) -> Options {
        Options { out: self.out.clone(), times: self.times.clone(), seed: self.seed, suite: self.suite.clone(), format: self.format }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph from a generator stanza and write it as JSON.
    Generate {
        #[arg(long, conflicts_with = "spec")]
        scenario: Option<PathBuf>,
        /// Bare generator JSON.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Graph summary and radial profiles.
    Inspect {
        #[arg(long, conflicts_with = "graph")]
        scenario: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sobolev and doubling certificates at the scenario centers.
    Certify {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run inequality-lab statements.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact kernels against the Gaussian bound over pairs and times.
    Scan {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Aggregate the run summaries below a directory.
    Report {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return exit::FAILURES;
        }
    };
    pool.install(|| match dispatch(&cli.command) {
        Ok((outcome, text)) => {
            // A closed stdout (e.g. piped into `head`) must not change the exit code.
            let mut out = std::io::stdout().lock();
            if let Some(text) = text {
                let _ = write!(out, "{text}");
            }
            let _ = writeln!(out, "{}: exit {} -> {}", outcome.summary.command, outcome.exit, outcome.dir.display());
            if outcome.exit == exit::UNCERTIFIED {
                eprintln!("hypothesis not certified for: {}", outcome.summary.uncertified.join(", "));
            }
            outcome.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    })
}

fn dispatch(cmd: &Command) -> Result<(Outcome, Option<String>), CliError> {
    use commands::*;
    let plain = |o: Outcome| (o, None);
    match cmd {
        Command::Generate { scenario, spec, common } => cmd_generate(scenario.as_deref(), spec.as_deref(), &common.options()).map(plain),
        Command::Inspect { scenario, graph, common } => cmd_inspect(scenario.as_deref(), graph.as_deref(), &common.options()).map(plain),
        Command::Certify { scenario, common } => cmd_certify(scenario, &common.options()).map(plain),
        Command::Verify { scenario, common } => cmd_verify(scenario, &common.options()).map(plain),
        Command::Scan { scenario, common } => cmd_scan(scenario, &common.options()).map(plain),
        Command::Report { dir, common } => cmd_report(dir, &common.options()).map(|(o, t)| (o, Some(t))),
    }
}

/// Parses `args` (including the program name) and runs; for in-process tests.
pub fn run_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::INVALID_CONFIG
            } else {
                exit::PASS
            }
        }
    }
}
