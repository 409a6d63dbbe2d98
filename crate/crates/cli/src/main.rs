//! `tconj`: configuration-driven checks of trace conjunction inequalities,
//! limit formulas and closed-form constants.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trace_conjunction_core::Error as CoreError;

use crate::commands::ConfigError;
use crate::config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "tconj",
    version,
    about = "Trace conjunction, Gagliardo and Hardy integral checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides the quadrature seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Tabulate closed-form constants over the grid.
    Constants,
    /// Check inequalities over fields and grid.
    Verify,
    /// `s → 1` limit studies.
    Bbm,
    /// Truncated conjunction integrals for wrong boundary data.
    Diverge,
    /// Constants against quadrature, and Monte Carlo calibration.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Verify => "verify",
            Command::Bbm => "bbm",
            Command::Diverge => "diverge",
            Command::Oracle => "oracle",
        }
    }
}

/// 2 for malformed requests and inadmissible parameters, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>()
            || cause.is::<serde_json::Error>()
            || cause.is::<std::io::Error>()
        {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::Parameter(_)
                | CoreError::Domain(_)
                | CoreError::FieldSpec(_)
                | CoreError::Unsupported(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.quad.seed = seed;
    }
    let format = cli.format.or(cfg.format).unwrap_or_default();
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(ConfigError("--jobs must be at least 1".into()).into());
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build()?;
    let doc = pool.install(|| match cli.command {
        Command::Constants => commands::constants(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Bbm => commands::bbm(&cfg),
        Command::Diverge => commands::diverge(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    })?;
    output::write(&doc, format, out.as_deref())?;
    let s = doc.summary;
    eprintln!(
        "{}: {} passed, {} failed, {} skipped",
        cli.command.name(),
        s.passed,
        s.failed,
        s.skipped
    );
    Ok(s.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
