//! Thin argv front end over [`phonon_sim::cli`].

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phonon_sim::cli::{self, RunOptions};
use phonon_sim::physconst::TrapConfig;
use phonon_sim::propagate::DEFAULT_TOL;
use phonon_sim::verify::VerifyOptions;

#[derive(Parser)]
#[command(
    name = "phonon-sim",
    version,
    about = "Laser-free trapped-ion phonon engineering: squeezers, beam splitters, Fredkin gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure scenario (fig1…fig6, params) or a JSON config file.
    Run {
        /// Scenario name or config path.
        target: String,
        /// Output directory for CSV and summary files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Parallel sweep workers (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Override the Fock truncation n_max.
        #[arg(long)]
        nmax: Option<usize>,
        /// Propagation error budget per reported time.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print derived trap parameters (ion spacing, ξ, η_b) as JSON.
    Params {
        /// Optional trap-config JSON; defaults to the built-in presets.
        trap_config: Option<PathBuf>,
        /// Write params.json here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite; exits 1 if any criterion fails.
    Verify {
        /// Also write verify_report.json here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the Fock truncation n_max.
        #[arg(long)]
        nmax: Option<usize>,
        /// Propagation error budget per reported time.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err))
        }
    }
}

fn dispatch(cli: Cli) -> phonon_sim::Result<ExitCode> {
    match cli.command {
        Command::Run {
            target,
            out,
            jobs,
            nmax,
            tol,
        } => {
            let opts = RunOptions {
                out_dir: out,
                jobs,
                n_max_override: nmax,
                tol: tol.unwrap_or(DEFAULT_TOL),
            };
            for path in cli::run_target(&target, &opts)? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Params { trap_config, out } => {
            let trap: Option<TrapConfig> = match trap_config {
                Some(path) => Some(serde_json::from_str(&std::fs::read_to_string(path)?)?),
                None => None,
            };
            let json = cli::params_json(trap.as_ref())?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let path = dir.join("params.json");
                    std::fs::write(&path, json)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { out, nmax, tol } => {
            let opts = VerifyOptions {
                n_max_override: nmax,
                tol: tol.unwrap_or(DEFAULT_TOL),
            };
            let all_passed = cli::run_verify(&opts, out.as_deref())?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
