//! `pdc`: run spectra, correlations, the single-cycle search and oracle audits
//! from scenario files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pdc_core::parallel::{with_threads, Execution};
use pdc_core::scenario::{run_correlation, run_oracle, run_single_cycle, run_spectrum, RunReport, Scenario};
use pdc_core::PdcError;

#[derive(Parser)]
#[command(name = "pdc", version, about = "Lossy parametric down-conversion in the quantum Langevin picture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signal and idler spectra, count rates and bandwidths.
    Spectrum(Common),
    /// Glauber correlation, coincidence rate and photon length.
    Correlation(Common),
    /// Photon length against idler frequency and the single-cycle root.
    SingleCycle(Common),
    /// Fast path against the brute-force references.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario TOML; merged over the preset when both are given.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// fig3, fig4-forward, fig4-backward, fig5 or fig6.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(command: Command) -> Result<RunReport, PdcError> {
    let (args, runner): (Common, fn(&Scenario, &std::path::Path, Execution) -> Result<RunReport, PdcError>) =
        match command {
            Command::Spectrum(a) => (a, run_spectrum),
            Command::Correlation(a) => (a, run_correlation),
            Command::SingleCycle(a) => (a, run_single_cycle),
            Command::Oracle(a) => (a, run_oracle),
        };
    let scenario = Scenario::load(args.preset.as_deref(), args.scenario.as_deref())?;
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    with_threads(threads, || runner(&scenario, &args.out, Execution::Parallel))?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pdc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
