//! `oscar2d` — benchmark runner for group-sparse matrix recovery.
//!
//! Subcommands:
//! - `gen`: generate a benchmark instance (signal, sensing matrix,
//!   observations) and write it to a directory.
//! - `solve`: run selected algorithms on a stored instance.
//! - `bench`: generate and run the full grid in one step, emitting the
//!   report CSV, the estimates and the configuration echo.
//! - `heatmap`: render a matrix CSV as a PGM snapshot.
//!
//! Exit codes: 0 on success, 1 for configuration problems (unreadable or
//! invalid config, bad arguments), 2 for runtime failures (any solver
//! hard-failure, output I/O).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oscar2d::datagen::{default_patterns, generate_instance};
use oscar2d::DenseMatrix;

use oscar2d_cli::config::{ConfigError, DebiasMode, ExperimentConfig};
use oscar2d_cli::experiment::{
    estimate_file_name, load_instance, run_experiment, run_grid_on, write_instance,
    ExperimentError, ExperimentOutcome,
};
use oscar2d_cli::heatmap::export_heatmap;
use oscar2d_cli::report::emit_report;

#[derive(Parser)]
#[command(
    name = "oscar2d",
    version,
    about = "Group-sparse matrix recovery benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by the experiment-running subcommands; each overrides the
/// corresponding config file entry.
#[derive(Args)]
struct GridArgs {
    /// Experiment config (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated algorithms (sparsa, fista, admm, padmm)
    #[arg(long)]
    algos: Option<String>,
    /// Debias states to run
    #[arg(long, value_enum)]
    debias: Option<DebiasMode>,
    /// Run grid cells concurrently (row times stop being comparable)
    #[arg(long)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance into a directory
    Gen {
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory for x_true.csv, a.csv, y.csv, instance.toml
        #[arg(long)]
        out: PathBuf,
    },
    /// Run algorithms on a stored instance
    Solve {
        /// Directory previously written by `gen`
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory for report.csv and estimates
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate an instance and run the full grid
    Bench {
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory for the report, estimates and config echo
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a matrix CSV as an ASCII PGM heatmap (plus sidecar CSV)
    Heatmap {
        /// Matrix CSV to render
        #[arg(long)]
        input: PathBuf,
        /// Output PGM path
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failures mapped to exit codes: config problems exit 1, runtime problems
/// exit 2.
enum CliFailure {
    Config(String),
    Runtime(String),
}

impl CliFailure {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliFailure::Config(_) => ExitCode::from(1),
            CliFailure::Runtime(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliFailure::Config(m) | CliFailure::Runtime(m) => m,
        }
    }
}

impl From<ConfigError> for CliFailure {
    fn from(e: ConfigError) -> Self {
        CliFailure::Config(e.to_string())
    }
}

impl From<ExperimentError> for CliFailure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(inner) => CliFailure::Config(inner.to_string()),
            ExperimentError::Datagen(inner) => CliFailure::Config(inner.to_string()),
            other => CliFailure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors; argument misuse is a
            // configuration problem.
            let code = if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliFailure> {
    match cli.command {
        Command::Gen { grid, out } => {
            let config = resolve_config(&grid, None)?;
            let patterns = match &config.patterns {
                Some(p) => p.clone(),
                None => default_patterns(),
            };
            let instance = generate_instance(&config.benchmark, &patterns)
                .map_err(|e| CliFailure::Config(e.to_string()))?;
            write_instance(&out, &instance, &config)?;
            println!("instance written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            instance,
            grid,
            out,
        } => {
            let (stored, echoed) = load_instance(&instance)?;
            let config = resolve_config(&grid, Some(echoed))?;
            let outcome = run_grid_on(&config, stored)?;
            write_results(&out, &outcome, false)?;
            finish(outcome)
        }
        Command::Bench { grid, out } => {
            let config = resolve_config(&grid, None)?;
            let outcome = run_experiment(&config)?;
            write_results(&out, &outcome, true)?;
            finish(outcome)
        }
        Command::Heatmap { input, out } => {
            let matrix =
                DenseMatrix::read_csv(&input).map_err(|e| CliFailure::Config(e.to_string()))?;
            let sidecar =
                export_heatmap(&matrix, &out).map_err(|e| CliFailure::Runtime(e.to_string()))?;
            println!("wrote {} and {}", out.display(), sidecar.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Loads the base configuration (the `--config` file, a stored instance's
/// echo, or the built-in defaults) and applies command-line overrides.
fn resolve_config(
    grid: &GridArgs,
    stored: Option<ExperimentConfig>,
) -> Result<ExperimentConfig, CliFailure> {
    let mut config = match (&grid.config, stored) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(echoed)) => echoed,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(seed) = grid.seed {
        config.benchmark.seed = seed;
    }
    if let Some(list) = &grid.algos {
        config.run.algos = ExperimentConfig::parse_algo_list(list)?;
    }
    if let Some(mode) = grid.debias {
        config.run.debias = mode;
    }
    if grid.parallel {
        config.run.parallel = true;
    }
    config.validate()?;
    Ok(config)
}

/// Writes report.csv, the per-cell estimates, and (for `bench`) the truth
/// matrix and the configuration echo.
fn write_results(
    out: &Path,
    outcome: &ExperimentOutcome,
    include_instance: bool,
) -> Result<(), CliFailure> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliFailure::Runtime(format!("cannot create {}: {e}", out.display())))?;

    let report_path = out.join("report.csv");
    emit_report(&outcome.report, &report_path)
        .map_err(|e| CliFailure::Runtime(format!("cannot write report: {e}")))?;

    for (row, estimate) in outcome.report.rows.iter().zip(&outcome.estimates) {
        if let Some(estimate) = estimate {
            let path = out.join(estimate_file_name(row.algorithm, row.debias));
            estimate
                .write_csv(&path)
                .map_err(|e| CliFailure::Runtime(e.to_string()))?;
        }
    }

    if include_instance {
        outcome
            .instance
            .x_true
            .write_csv(out.join("x_true.csv"))
            .map_err(|e| CliFailure::Runtime(e.to_string()))?;
        std::fs::write(
            out.join("config_echo.toml"),
            outcome.report.config_echo.to_toml(),
        )
        .map_err(|e| CliFailure::Runtime(format!("cannot write config echo: {e}")))?;
    }
    Ok(())
}

/// Prints per-row failures and picks the final exit code: 2 when any grid
/// cell hard-failed, 0 otherwise.
fn finish(outcome: ExperimentOutcome) -> Result<ExitCode, CliFailure> {
    let mut failed = false;
    for row in &outcome.report.rows {
        if let Some(error) = &row.error {
            failed = true;
            let state = if row.debias { "debiased" } else { "raw" };
            eprintln!("error: {} ({state}) failed: {error}", row.algorithm);
        }
    }
    Ok(if failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}
