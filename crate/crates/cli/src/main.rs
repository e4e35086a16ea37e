use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qinstr::scenarios::{builtin, Scenario};
use qinstr_cli::scenario_file::{from_scenario, read_scenario, to_json};
use qinstr_cli::{commands, CliError, Output};

/// Entropic bounds on the classical information extracted by quantum instruments.
#[derive(Parser)]
#[command(name = "qinstr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every bound for a scenario and check their ordering.
    Bounds {
        /// Scenario file (JSON).
        file: Option<PathBuf>,
        /// Builtin scenario instead of a file.
        #[arg(long, conflicts_with = "file", requires = "x")]
        builtin: Option<String>,
        /// Time parameter of the builtin scenario.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
    /// Tabulate the bounds of a builtin scenario over a grid of x as CSV.
    Sweep {
        #[arg(long)]
        builtin: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, allow_hyphen_values = true)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant suites on seeded random scenarios.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Maximize the mutual information over POVMs for a scenario's ensemble.
    Accinfo {
        file: PathBuf,
        /// Number of POVM outcomes (default d^2).
        #[arg(long)]
        outcomes: Option<usize>,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a builtin scenario as an explicit scenario file.
    Export {
        #[arg(long)]
        builtin: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Output path; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(file: Option<PathBuf>, name: Option<String>, x: Option<f64>) -> Result<Scenario, CliError> {
    match (file, name) {
        (Some(path), None) => read_scenario(&path),
        (None, Some(name)) => {
            let x = x.ok_or_else(|| CliError::Usage("--builtin needs --x".into()))?;
            builtin(&name, x).map_err(|e| CliError::Usage(e.to_string()))
        }
        _ => Err(CliError::Usage("give a scenario file or --builtin NAME --x V".into())),
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Bounds { file, builtin, x } => commands::bounds(&load(file, builtin, x)?),
        Command::Sweep { builtin, from, to, step, out } => {
            let csv = commands::sweep(&builtin, from, to, step)?;
            write(&out, &csv)?;
            let rows = csv.lines().count() - 1;
            Ok(Output { text: format!("wrote {rows} rows to {}\n", out.display()), passed: true })
        }
        Command::Verify { seed, trials } => commands::verify(seed, trials),
        Command::Accinfo { file, outcomes, restarts, seed } => {
            commands::accinfo(&read_scenario(&file)?, outcomes, restarts, seed)
        }
        Command::Export { builtin: name, x, out } => {
            let s = builtin(&name, x).map_err(|e| CliError::Usage(e.to_string()))?;
            let json = to_json(&from_scenario(&s)) + "\n";
            match out {
                Some(path) => {
                    write(&path, &json)?;
                    Ok(Output { text: String::new(), passed: true })
                }
                None => Ok(Output { text: json, passed: true }),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qinstr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
