//! Grid execution: generate (or load) a benchmark instance, run the
//! requested algorithm x debias cells, and time each cell.
//!
//! The reported wall time covers the solve plus the optional debiasing pass
//! and nothing else — generation, metric evaluation and file output all
//! happen outside the timed region. A failing cell is captured in its report
//! row instead of aborting the rest of the grid.

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use oscar2d::datagen::{default_patterns, generate_instance, BenchmarkInstance, DatagenError};
use oscar2d::debias::{debias, DebiasConfig};
use oscar2d::linalg::LinalgError;
use oscar2d::metrics::{evaluate, MetricReport, MetricsError};
use oscar2d::solvers::{solve, SolverError};
use oscar2d::{Algorithm, DenseMatrix, Problem};

use crate::config::{ConfigError, ExperimentConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("data generation failed: {0}")]
    Datagen(#[from] DatagenError),
    #[error("problem assembly failed: {0}")]
    Problem(#[from] SolverError),
    #[error("metrics failed: {0}")]
    Metrics(#[from] MetricsError),
    #[error("matrix I/O failed: {0}")]
    Linalg(#[from] LinalgError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One grid cell of the report.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub algorithm: Algorithm,
    pub debias: bool,
    /// `None` when the cell failed; see [`ReportRow::error`].
    pub metrics: Option<MetricReport>,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

/// The full report: one row per requested (algorithm, debias) pair, in grid
/// order, plus the resolved configuration that reproduces it.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    pub config_echo: ExperimentConfig,
}

/// Report plus the matrices behind it, for snapshot export.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub instance: BenchmarkInstance,
    /// Estimates aligned with `report.rows`; `None` for failed cells.
    pub estimates: Vec<Option<DenseMatrix>>,
}

/// Generates the instance described by `config` and runs the requested grid.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let patterns = match &config.patterns {
        Some(p) => p.clone(),
        None => default_patterns(),
    };
    let instance = generate_instance(&config.benchmark, &patterns)?;
    run_grid_on(config, instance)
}

/// Runs the requested grid on an already-materialized instance.
pub fn run_grid_on(
    config: &ExperimentConfig,
    instance: BenchmarkInstance,
) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let problem = Problem::new(
        instance.a.clone(),
        instance.y.clone(),
        config.benchmark.params(),
    )?;

    let cells: Vec<(Algorithm, bool)> = config
        .run
        .algos
        .iter()
        .flat_map(|&algo| config.run.debias.states().iter().map(move |&f| (algo, f)))
        .collect();

    let outcomes: Vec<(ReportRow, Option<DenseMatrix>)> = if config.run.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cells
                .iter()
                .map(|&(algo, flag)| {
                    let problem = &problem;
                    let truth = &instance.x_true;
                    scope.spawn(move || run_cell(problem, truth, config, algo, flag))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("cell panicked"))
                .collect()
        })
    } else {
        cells
            .iter()
            .map(|&(algo, flag)| run_cell(&problem, &instance.x_true, config, algo, flag))
            .collect()
    };

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut estimates = Vec::with_capacity(outcomes.len());
    for (row, estimate) in outcomes {
        rows.push(row);
        estimates.push(estimate);
    }

    Ok(ExperimentOutcome {
        report: ExperimentReport {
            seed: config.benchmark.seed,
            rows,
            config_echo: config.clone(),
        },
        instance,
        estimates,
    })
}

fn run_cell(
    problem: &Problem,
    truth: &DenseMatrix,
    config: &ExperimentConfig,
    algorithm: Algorithm,
    debias_flag: bool,
) -> (ReportRow, Option<DenseMatrix>) {
    let fail = |iterations, converged, message: String| {
        (
            ReportRow {
                algorithm,
                debias: debias_flag,
                metrics: None,
                iterations,
                converged,
                error: Some(message),
            },
            None,
        )
    };

    let start = Instant::now();
    let solved = match solve(problem, &config.solver, algorithm) {
        Ok(s) => s,
        Err(e) => return fail(0, false, e.to_string()),
    };
    let estimate = if debias_flag {
        match debias(
            problem.a(),
            problem.y(),
            &solved.x_hat,
            &DebiasConfig::default(),
        ) {
            Ok(outcome) => outcome.x,
            Err(e) => return fail(solved.iterations, solved.converged, e.to_string()),
        }
    } else {
        solved.x_hat
    };
    let elapsed = start.elapsed().as_secs_f64();

    match evaluate(&estimate, truth, elapsed) {
        Ok(metrics) => (
            ReportRow {
                algorithm,
                debias: debias_flag,
                metrics: Some(metrics),
                iterations: solved.iterations,
                converged: solved.converged,
                error: None,
            },
            Some(estimate),
        ),
        Err(e) => fail(solved.iterations, solved.converged, e.to_string()),
    }
}

const TRUTH_FILE: &str = "x_true.csv";
const SENSING_FILE: &str = "a.csv";
const OBSERVATION_FILE: &str = "y.csv";
const INSTANCE_CONFIG_FILE: &str = "instance.toml";

/// Writes an instance and the configuration that produced it into `dir`
/// (`x_true.csv`, `a.csv`, `y.csv`, `instance.toml`).
pub fn write_instance(
    dir: &Path,
    instance: &BenchmarkInstance,
    config: &ExperimentConfig,
) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    instance.x_true.write_csv(dir.join(TRUTH_FILE))?;
    instance.a.write_csv(dir.join(SENSING_FILE))?;
    instance.y.write_csv(dir.join(OBSERVATION_FILE))?;
    let config_path = dir.join(INSTANCE_CONFIG_FILE);
    std::fs::write(&config_path, config.to_toml()).map_err(|source| ExperimentError::Io {
        path: config_path.display().to_string(),
        source,
    })?;
    Ok(())
}

/// Loads an instance written by [`write_instance`], returning it with the
/// echoed configuration.
pub fn load_instance(dir: &Path) -> Result<(BenchmarkInstance, ExperimentConfig), ExperimentError> {
    let x_true = DenseMatrix::read_csv(dir.join(TRUTH_FILE))?;
    let a = DenseMatrix::read_csv(dir.join(SENSING_FILE))?;
    let y = DenseMatrix::read_csv(dir.join(OBSERVATION_FILE))?;
    let config = ExperimentConfig::load(dir.join(INSTANCE_CONFIG_FILE))?;
    Ok((BenchmarkInstance { x_true, a, y }, config))
}

/// The standard estimate file name for a grid cell, e.g.
/// `x_hat_sparsa_debiased.csv`.
pub fn estimate_file_name(algorithm: Algorithm, debias: bool) -> PathBuf {
    let suffix = if debias { "debiased" } else { "raw" };
    PathBuf::from(format!("x_hat_{algorithm}_{suffix}.csv"))
}
