//! recurgcd: exact log-gcd sweeps and recurrence diagnostics over Q and
//! quadratic fields.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CmdOutput;
use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "recurgcd",
    about = "Exact log-gcd sweeps, Hilbert slices and linear recurrence diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (key=value with recurrence blocks).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the sweep bound from the config.
    #[arg(long)]
    n_max: Option<u64>,
    /// Override epsilon, as an exact rational P/Q.
    #[arg(long)]
    eps: Option<String>,
    /// Override the working precision in bits.
    #[arg(long)]
    precision: Option<u32>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep n and compare log gcd(F(n), G(n)) against eps * n.
    LoggcdSweep(CommonArgs),
    /// Sweep a grid (m, n) and compare log gcd(F(m), G(n)) with eps * max(m, n).
    PairSweep(CommonArgs),
    /// Multiplicative structure of the roots and per-residue coprimality of
    /// the split recurrences.
    Group(CommonArgs),
    /// Exact zero set of F over the sweep range.
    Skolem(CommonArgs),
    /// S-integrality of the quotients F(n)/G(n).
    Hadamard(CommonArgs),
    /// Schmidt subspace inequality check for a family of moving hyperplanes.
    Subspace(CommonArgs),
    /// Product-formula self-test on random field elements.
    Selftest(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::LoggcdSweep(a)
            | Command::PairSweep(a)
            | Command::Group(a)
            | Command::Skolem(a)
            | Command::Hadamard(a)
            | Command::Subspace(a)
            | Command::Selftest(a) => a,
        }
    }
}

fn load_config(args: &CommonArgs, optional: bool) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if optional => ExperimentConfig::default(),
        None => anyhow::bail!("--config is required for this subcommand"),
    };
    if let Some(n) = args.n_max {
        cfg.n_max = n;
    }
    if let Some(eps) = &args.eps {
        cfg.eps = config::parse_rational(eps)?;
        if !num_traits::Signed::is_positive(&cfg.eps) {
            anyhow::bail!("eps must be positive");
        }
    }
    if let Some(p) = args.precision {
        cfg.precision = p;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn run() -> anyhow::Result<usize> {
    let cli = Cli::parse();
    let args = cli.command.args();
    let optional_config = matches!(cli.command, Command::Selftest(_));
    let cfg = load_config(args, optional_config)?;

    let CmdOutput { csv, summary, undecided } = match &cli.command {
        Command::LoggcdSweep(_) => commands::cmd_loggcd_sweep(&cfg)?,
        Command::PairSweep(_) => commands::cmd_pair_sweep(&cfg)?,
        Command::Group(_) => commands::cmd_group(&cfg)?,
        Command::Skolem(_) => commands::cmd_skolem(&cfg)?,
        Command::Hadamard(_) => commands::cmd_hadamard(&cfg)?,
        Command::Subspace(_) => commands::cmd_subspace(&cfg)?,
        Command::Selftest(_) => commands::cmd_selftest(&cfg)?,
    };

    for (key, value) in &summary {
        println!("{key}: {value}");
    }
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            println!("csv: {}", path.display());
        }
        None => {
            print!("{csv}");
        }
    }
    Ok(undecided)
}

fn main() -> ExitCode {
    match run() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2), // undecided comparisons present
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
