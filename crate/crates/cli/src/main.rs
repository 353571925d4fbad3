use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unotsim::spinstates::EnsembleKind;
use unotsim_cli::config::{DEFAULT_FOCK_CUTOFF, DEFAULT_SEED, DEFAULT_SHOTS};
use unotsim_cli::report::{write_report_outputs, write_run_outputs};
use unotsim_cli::{build_report, compute_theory, discrepancy_flags, run_pipeline, CliResult, Report, RunConfig};

#[derive(Parser)]
#[command(name = "unotsim", version, about = "Universal-NOT correlation experiments on simulated spin pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact correlations of the aligned and anti-aligned ensembles.
    Theory {
        /// Directory for report.json and theory.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate preparation, optional flip, tomography and bootstrap.
    Run {
        #[arg(long, value_parser = parse_state)]
        state: EnsembleKind,
        #[arg(long)]
        apply_unot: bool,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = unotsim::tomography::DEFAULT_RESAMPLES)]
        resamples: usize,
        #[arg(long, default_value_t = DEFAULT_FOCK_CUTOFF)]
        fock_cutoff: usize,
        /// Output directory; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate report.json files from `theory` and `run`.
    Report {
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_state(s: &str) -> Result<EnsembleKind, String> {
    s.parse().map_err(|e: unotsim::Error| e.to_string())
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Theory { out } => {
            let theory = compute_theory()?;
            print!("{}", theory.to_text());
            let flags = discrepancy_flags(&theory);
            for f in &flags {
                println!("note: {f}");
            }
            if let Some(dir) = out {
                write_report_outputs(&dir, &Report::new(theory, None, flags))?;
            }
        }
        Command::Run {
            state,
            apply_unot,
            shots,
            seed,
            resamples,
            fock_cutoff,
            out,
        } => {
            let config = RunConfig {
                state,
                apply_unot,
                shots,
                seed,
                resamples,
                fock_cutoff,
                output_path: out,
            };
            let output = run_pipeline(&config)?;
            match &config.output_path {
                Some(dir) => {
                    write_run_outputs(dir, &output)?;
                    if let Some(e) = &output.report.experiment {
                        println!("fidelity prepared {:.4}", e.before.fidelity.value);
                        if let Some(a) = &e.after {
                            println!("fidelity final {:.4}", a.fidelity.value);
                        }
                        if let Some(c) = &e.change {
                            println!(
                                "delta change {:.3} +- {:.3}, J change {:.3} (combined half-width {:.3})",
                                c.discord.value,
                                c.discord.half_width,
                                c.classical.value,
                                c.classical_combined_half_width
                            );
                        }
                    }
                }
                None => print!("{}", output.report.to_json()),
            }
        }
        Command::Report { inputs, out } => {
            let summary = build_report(&inputs, &out)?;
            println!("{} inputs, {} runs tabulated in {}", summary.inputs.len(), summary.runs.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
