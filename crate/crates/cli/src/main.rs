//! `cpflow` command-line driver.
//!
//! Exit codes: 0 success, 1 tolerance breach, 2 configuration error,
//! 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpflow::scenario::{self, Method};
use cpflow::{Error, ErrorKind};

const EXIT_BREACH: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "cpflow", version, about = "Quantum dynamics as classical Hamiltonian flow on CP^(N-1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write observables as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both methods and check that they agree within a tolerance.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the scenario's tolerance (default 1e-6).
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Parse and validate a scenario without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Quantum,
    Classical,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Quantum => Method::Quantum,
            MethodArg::Classical => Method::Classical,
            MethodArg::Both => Method::Both,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err.kind() {
        ErrorKind::Numeric => EXIT_NUMERIC,
        ErrorKind::Input | ErrorKind::Io => EXIT_CONFIG,
    }
}

fn load(path: &PathBuf) -> Result<scenario::ScenarioConfig, (u8, anyhow::Error)> {
    scenario::load_scenario(path).map_err(|e| {
        let code = match e {
            // A scenario that cannot be read is a configuration problem.
            Error::Io(_) => EXIT_CONFIG,
            ref other => exit_code(other),
        };
        (code, anyhow::Error::new(e).context(format!("loading {}", path.display())))
    })
}

fn execute(cli: Cli) -> Result<u8, (u8, anyhow::Error)> {
    let fail = |e: Error| (exit_code(&e), anyhow::Error::new(e));
    match cli.command {
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!(
                "{}: valid (N = {}, {} steps, observables: {})",
                cfg.name,
                cfg.dim(),
                cfg.grid.steps(),
                cfg.observables.iter().map(|o| o.name()).collect::<Vec<_>>().join(", ")
            );
            Ok(0)
        }
        Command::Simulate { config, method, out } => {
            let cfg = load(&config)?;
            let output = scenario::run(&cfg, method.into()).map_err(fail)?;
            scenario::emit_csv(&output, &out).map_err(|e| {
                (EXIT_CONFIG, anyhow::Error::new(e).context(format!("writing {}", out.display())))
            })?;
            if let Some(c) = &output.classical {
                eprintln!("{} rows written to {} ({} chart switches)", output.rows.len(), out.display(), c.switch_count());
            } else {
                eprintln!("{} rows written to {}", output.rows.len(), out.display());
            }
            Ok(0)
        }
        Command::Compare {
            config,
            tolerance,
            report,
        } => {
            if let Some(t) = tolerance {
                if !(t.is_finite() && t > 0.0) {
                    return Err((EXIT_CONFIG, anyhow::anyhow!("--tolerance must be positive, got {t}")));
                }
            }
            let cfg = load(&config)?;
            let rep = scenario::compare(&cfg, tolerance).map_err(fail)?;
            print!("{}", rep.summary());
            if let Some(path) = report {
                rep.write_json(&path).map_err(|e| {
                    (EXIT_CONFIG, anyhow::Error::new(e).context(format!("writing {}", path.display())))
                })?;
            }
            Ok(if rep.passed { 0 } else { EXIT_BREACH })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
