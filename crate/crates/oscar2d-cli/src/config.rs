//! Experiment configuration: a versioned TOML schema covering the benchmark
//! instance, solver parameters and the run grid.
//!
//! Every field has a default, so the empty file is a valid configuration and
//! describes the canonical 100x10 benchmark. A serialized configuration
//! parses back to an equivalent one, which is what lets reports echo the
//! exact configuration they were produced from.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use oscar2d::datagen::{BenchmarkConfig, PatternSpec};
use oscar2d::solvers::{Algorithm, SolverConfig};

/// Version of the configuration schema this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// The inner message is the TOML parser's, which carries line and column
    /// positions.
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported schema_version {got}; this build reads version {SCHEMA_VERSION}")]
    SchemaVersion { got: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Which debias states to run for each algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[clap(rename_all = "lowercase")]
pub enum DebiasMode {
    On,
    Off,
    Both,
}

impl DebiasMode {
    /// Debias flags in report order; `both` lists the debiased row first,
    /// matching the usual yes/no table layout.
    pub fn states(self) -> &'static [bool] {
        match self {
            DebiasMode::On => &[true],
            DebiasMode::Off => &[false],
            DebiasMode::Both => &[true, false],
        }
    }
}

impl fmt::Display for DebiasMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DebiasMode::On => "on",
            DebiasMode::Off => "off",
            DebiasMode::Both => "both",
        })
    }
}

impl FromStr for DebiasMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on" => Ok(DebiasMode::On),
            "off" => Ok(DebiasMode::Off),
            "both" => Ok(DebiasMode::Both),
            other => Err(format!(
                "unknown debias mode '{other}' (expected on, off or both)"
            )),
        }
    }
}

/// The grid to run: which algorithms, which debias states, and whether grid
/// cells may run concurrently. Parallel runs keep the report row order but
/// give up wall-time comparability between rows, so the flag is opt-in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub algos: Vec<Algorithm>,
    pub debias: DebiasMode,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algos: Algorithm::ALL.to_vec(),
            debias: DebiasMode::Both,
            parallel: false,
        }
    }
}

/// Root of the configuration file.
///
/// Field order matters for TOML serialization: plain values first, tables
/// after.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub benchmark: BenchmarkConfig,
    pub solver: SolverConfig,
    pub run: RunConfig,
    /// Explicit signal layout; the built-in 100-cell layout when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patterns: Option<Vec<PatternSpec>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            benchmark: BenchmarkConfig::default(),
            solver: SolverConfig::default(),
            run: RunConfig::default(),
            patterns: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a configuration file.
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|err| match err {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    /// Parses and validates configuration text.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: "<config>".into(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Serializes the resolved configuration; parsing the result yields an
    /// equivalent configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion {
                got: self.schema_version,
            });
        }
        self.benchmark
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.solver
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.run.algos.is_empty() {
            return Err(ConfigError::Invalid("run.algos must not be empty".into()));
        }
        for (i, algo) in self.run.algos.iter().enumerate() {
            if self.run.algos[..i].contains(algo) {
                return Err(ConfigError::Invalid(format!(
                    "run.algos lists {algo} twice; each algorithm appears once per report"
                )));
            }
        }
        Ok(())
    }

    /// Parses a comma-separated algorithm list (the `--algos` argument).
    pub fn parse_algo_list(list: &str) -> Result<Vec<Algorithm>, ConfigError> {
        let mut algos = Vec::new();
        for part in list.split(',') {
            let name = part.trim();
            if name.is_empty() {
                continue;
            }
            algos.push(Algorithm::from_str(name).map_err(|e| ConfigError::Invalid(e.to_string()))?);
        }
        if algos.is_empty() {
            return Err(ConfigError::Invalid(format!(
                "algorithm list '{list}' names no algorithms"
            )));
        }
        Ok(algos)
    }
}
