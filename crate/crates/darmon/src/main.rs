use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use darmon::config::{Overrides, RunConfig};
use darmon::run::{run, RunOptions, Subcommand};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Invariants,
    Point,
    TreeOrbits,
    GkzScan,
    Selftest,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Invariants => Subcommand::Invariants,
            Command::Point => Subcommand::Point,
            Command::TreeOrbits => Subcommand::TreeOrbits,
            Command::GkzScan => Subcommand::GkzScan,
            Command::Selftest => Subcommand::Selftest,
        }
    }
}

/// Darmon points over real quadratic fields.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; selftest falls back to the E31 example.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    precision_bits: Option<usize>,
    #[arg(long)]
    norm_bound: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<i32>,
    #[arg(long)]
    t_max: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Coefficient table cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sub = Subcommand::from(cli.command);
    let base = match (&cli.config, sub) {
        (Some(p), _) => RunConfig::load(p),
        (None, Subcommand::Selftest) => Ok(darmon::fixtures::e31_config()),
        (None, _) => {
            eprintln!("error: --config is required for {}", sub.name());
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides { precision_bits: cli.precision_bits, norm_bound: cli.norm_bound, beta: cli.beta, t_max: cli.t_max };
    let cfg = match base.and_then(|c| c.apply(&overrides)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions { out: cli.out, threads: cli.threads.max(1), cache: cli.cache, budget: None };
    match run(sub, &cfg, &opts) {
        Ok(o) => {
            eprint!("{}", o.log);
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
