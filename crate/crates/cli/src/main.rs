use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lhv_cli::{execute, CliError, Command, OutputFormat, Overrides};

#[derive(Parser)]
#[command(
    name = "lhv",
    version,
    about = "Local-hidden-variable model of two-photon polarization coincidences"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quantum prediction and leading-order model value on the settings grid.
    Predict(Common),
    /// Monte Carlo, quadrature, closed-form and leading-order joint probabilities.
    Simulate(Common),
    /// Fair-sampling sum-rule residuals and their scaling with epsilon.
    FairSampling(Common),
    /// Factorization assumption, raw and renormalized.
    Factorization(Common),
    /// The four Hardy probabilities, quantum vs model.
    Hardy(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted and the config sets no path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; overrides `output.format`.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Overrides `monte_carlo.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Predict(c) => (Command::Predict, c),
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::FairSampling(c) => (Command::FairSampling, c),
        Cmd::Factorization(c) => (Command::Factorization, c),
        Cmd::Hardy(c) => (Command::Hardy, c),
    };
    let overrides = Overrides {
        seed: common.seed,
        format: common.format,
        out: common.out,
    };
    match execute(command, &common.config, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lhv {}: {e:#}", command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
