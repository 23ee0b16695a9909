//! Command-line runner: constants tables, Gaussian closed forms, bound
//! verification, stability sweeps and tightness scans.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use indirect_coulomb::Error;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  1  an inequality was violated
  2  usage or configuration error
  3  numerical divergence

Without --config each command runs on its built-in default grid or corpus.
The SEED environment variable overrides the config seed; --seed overrides both.";

#[derive(Parser, Debug)]
#[command(name = "indirect-coulomb", version, about, after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; tables are csv, reports json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Base seed for Monte Carlo estimates.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Multiplies the leading coefficient b̃² before comparing.
    #[arg(long, global = true, hide = true, default_value_t = 1.0)]
    debug_beta_scale: f64,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Table of β, b̃², ã², C(γ), C(δ), α, δ over a (γ, ε) grid.
    Constants,
    /// L, G and G/L of Gaussian densities, closed form against quadrature.
    GaussianExample,
    /// Checks the lower bound on every (spec, γ, ε) cell; JSON report.
    VerifyBound,
    /// Evaluates ξ(ρ) over a corpus of densities and nuclear configurations.
    StabilitySweep,
    /// Tightness ratio over (spec, γ, ε); CSV table.
    Scan,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Numerical(Error),
    Io(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence(_) => RunError::Numerical(e),
            other => RunError::Usage(other.to_string()),
        }
    }
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) | RunError::Io(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) | RunError::Io(m) => f.write_str(m),
            RunError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

fn natural_format(cmd: Command) -> Format {
    match cmd {
        Command::Constants | Command::GaussianExample | Command::Scan => Format::Csv,
        Command::VerifyBound | Command::StabilitySweep => Format::Json,
    }
}

fn seed_override(cli: &Cli) -> Result<Option<u64>, RunError> {
    if cli.seed.is_some() {
        return Ok(cli.seed);
    }
    match std::env::var("SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| RunError::Usage(format!("SEED must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<commands::Output, RunError> {
    if let Some(f) = cli.format {
        if f != natural_format(cli.command) {
            return Err(RunError::Usage(format!(
                "{:?} output is not available for this command",
                f
            )));
        }
    }
    if !(cli.debug_beta_scale > 0.0) {
        return Err(RunError::Usage("beta scale must be positive".into()));
    }
    let seed = seed_override(cli)?;
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Constants => commands::constants(&config::load(cfg)?),
        Command::GaussianExample => commands::gaussian_example(&config::load(cfg)?),
        Command::VerifyBound => commands::verify_bound(&config::load(cfg)?, seed, cli.debug_beta_scale),
        Command::StabilitySweep => commands::stability_sweep(&config::load(cfg)?),
        Command::Scan => commands::scan(&config::load(cfg)?, seed, cli.debug_beta_scale),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = match cli.jobs {
        Some(0) => {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let output = match pool.install(|| run(&cli)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&output.body).map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if output.violation {
        eprintln!("error: inequality violated");
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
