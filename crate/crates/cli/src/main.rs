use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use efqse_cli::config::{Mode, Overrides, RunConfig};
use efqse_cli::pipeline::Pipeline;

/// Active-space spectra from a forged variational ground state with a
/// subspace expansion for excited states, in exact, finite-shot, and
/// noisy-with-mitigation execution modes, compared against exact
/// diagonalization.
#[derive(Parser)]
#[command(name = "efqse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the configured execution mode (exact|sampled|noisy).
    #[arg(long)]
    mode: Option<Mode>,
    /// Override the per-circuit shot budget.
    #[arg(long)]
    shots: Option<u64>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output bundle directory.
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Size of the worker thread pool (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact diagonalization of the active-space problem.
    Casci(CommonArgs),
    /// Variational optimization of the forged ground state.
    Forge(CommonArgs),
    /// Excited-state spectra for every mode up to the configured one.
    Qse(CommonArgs),
    /// Cross-mode comparison table and deviation summary.
    Compare(CommonArgs),
    /// Full pipeline plus the rendered text report.
    Report(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Casci(a)
            | Command::Forge(a)
            | Command::Qse(a)
            | Command::Compare(a)
            | Command::Report(a) => a,
        }
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    let common = cli.command.common();
    if let Some(threads) = common.threads {
        if threads > 0 {
            // ignore the error if a pool was already installed
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let overrides = Overrides {
        mode: common.mode,
        shots: common.shots,
        seed: common.seed,
        output_dir: common.output.clone(),
        threads: common.threads,
    };
    let config = RunConfig::load(&common.config, &overrides).map_err(|e| {
        eprintln!("config error: {e}");
        ExitCode::from(2)
    })?;
    let pipeline = Pipeline::new(config).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(3)
    })?;

    let numerical = |e: efqse_cli::PipelineError| {
        eprintln!("{e}");
        ExitCode::from(3)
    };
    match cli.command {
        Command::Casci(_) => {
            let spectrum = pipeline.casci().map_err(numerical)?;
            println!("{}", efqse_core::qse::excitation_report(&spectrum));
        }
        Command::Forge(_) => {
            let record = pipeline.forge().map_err(numerical)?;
            println!(
                "forged ground state: E = {:.10} Hartree (converged: {}, {} evaluations)",
                record.energy_hartree, record.converged, record.n_evaluations
            );
        }
        Command::Qse(_) => {
            let spectra = pipeline.qse().map_err(numerical)?;
            for (mode, spectrum) in &spectra {
                println!("[{}]", mode.label());
                println!("{}", efqse_core::qse::excitation_report(spectrum));
            }
        }
        Command::Compare(_) => {
            let artifacts = pipeline.compare().map_err(numerical)?;
            for pair in &artifacts.deviations.pairs {
                println!(
                    "{}: mean |ddE| = {:.6} eV over {} states",
                    pair.pair, pair.dd_mean, pair.n_states
                );
            }
        }
        Command::Report(_) => {
            let text = pipeline.report().map_err(numerical)?;
            println!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
