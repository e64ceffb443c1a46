use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hqi_cli::{run, Experiment, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "hqi", version, about = "Hermite quasi-interpolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment file; defaults reproduce the paper's setups.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Main CSV; auxiliary tables go to `<out>.<name>.csv`. Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    /// Worker threads (rayon); output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sup-errors and observed orders over an h sequence.
    Converge,
    /// Saturation of the Gaussian sum for harmonic functions.
    Harmonic,
    /// sigma_beta amplitudes, Poisson identity and epsilon bounds.
    Saturation,
    /// Moment conditions for seeded random Q.
    MomentsCheck,
    /// Derivatives of the quasi-interpolant.
    Deriv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = match cli.command {
        Command::Converge => Experiment::Converge,
        Command::Harmonic => Experiment::Harmonic,
        Command::Saturation => Experiment::Saturation,
        Command::MomentsCheck => Experiment::MomentsCheck,
        Command::Deriv => Experiment::Deriv,
    };
    let result = (|| {
        let cfg = match &cli.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            pool = pool.num_threads(t);
        }
        let pool = pool
            .build()
            .map_err(|e| hqi_cli::CliError::Config(format!("thread pool: {e}")))?;
        let over = Overrides {
            tail_tol: cli.tail_tol,
            seed: cli.seed,
        };
        let outcome = pool.install(|| run(kind, &cfg, over))?;
        outcome.write(cli.out.as_deref())?;
        Ok::<_, hqi_cli::CliError>(outcome)
    })();
    match result {
        Ok(outcome) => {
            for c in &outcome.checks {
                if !c.passed {
                    eprintln!("FAIL {}: {}", c.name, c.detail);
                }
            }
            let failed = outcome.checks.iter().filter(|c| !c.passed).count();
            eprintln!("{} checks, {} failed", outcome.checks.len(), failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("hqi: {e}");
            ExitCode::from(2)
        }
    }
}
