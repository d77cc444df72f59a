//! Proximal splitting solvers for the 2OSCAR-regularized least-squares
//! problem `min_X 0.5 * ||A X - Y||_F^2 + Phi(X)`.
//!
//! Four algorithms share the same problem and result types: SpaRSA
//! (Barzilai-Borwein steps with backtracking), FISTA (accelerated proximal
//! gradient), ADMM (variable splitting with a cached Cholesky solve) and
//! PADMM (a preconditioned primal-dual variant that never inverts anything).
//! All solvers are deterministic: same problem, config and algorithm give
//! bitwise-identical iterates.

mod admm;
mod fista;
mod padmm;
mod sparsa;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, DenseMatrix, LinalgError};
use crate::prox::{oscar_value, OscarParams, ProxError};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("A has {a_rows} rows but Y has {y_rows}")]
    ObservationRows { a_rows: usize, y_rows: usize },
    #[error("iterate is {got_rows}x{got_cols} but the problem expects {rows}x{cols}")]
    IterateShape {
        got_rows: usize,
        got_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Prox(#[from] ProxError),
}

/// A problem instance: sensing matrix `A` (m x n), observations `Y` (m x d)
/// and the regularization strengths. Estimates have shape n x d.
#[derive(Clone, Debug)]
pub struct Problem {
    a: DenseMatrix,
    y: DenseMatrix,
    params: OscarParams,
}

impl Problem {
    pub fn new(a: DenseMatrix, y: DenseMatrix, params: OscarParams) -> Result<Self, SolverError> {
        if a.rows() != y.rows() {
            return Err(SolverError::ObservationRows {
                a_rows: a.rows(),
                y_rows: y.rows(),
            });
        }
        params.validate()?;
        Ok(Problem { a, y, params })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn y(&self) -> &DenseMatrix {
        &self.y
    }

    pub fn params(&self) -> OscarParams {
        self.params
    }

    /// Shape of an estimate: `(A.cols, Y.cols)`.
    pub fn estimate_shape(&self) -> (usize, usize) {
        (self.a.cols(), self.y.cols())
    }
}

/// SpaRSA-specific parameters: the backtracking growth factor and the
/// safeguard interval for the Barzilai-Borwein step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SparsaConfig {
    pub eta: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub max_backtracks: usize,
}

impl Default for SparsaConfig {
    fn default() -> Self {
        SparsaConfig {
            eta: 2.0,
            alpha_min: 1e-30,
            alpha_max: 1e30,
            max_backtracks: 50,
        }
    }
}

/// FISTA-specific parameters: the factor applied to the squared spectral
/// norm estimate when forming the gradient step `1 / L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FistaConfig {
    pub lipschitz_margin: f64,
}

impl Default for FistaConfig {
    fn default() -> Self {
        FistaConfig {
            lipschitz_margin: 1.0,
        }
    }
}

/// ADMM-specific parameters: the augmented Lagrangian penalty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmmConfig {
    pub rho: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig { rho: 1.0 }
    }
}

/// PADMM-specific parameters: primal and dual steps are both set to
/// `step_fraction / ||A||_2`, which keeps the product of step sizes inside
/// the convergence region as long as `step_fraction < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PadmmConfig {
    pub step_fraction: f64,
}

impl Default for PadmmConfig {
    fn default() -> Self {
        PadmmConfig {
            step_fraction: 0.99,
        }
    }
}

/// Shared solver configuration plus per-algorithm sections.
///
/// `x0` is an optional warm start (zero matrix when absent); it is not
/// serialized, so configs echo cleanly to TOML.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub sparsa: SparsaConfig,
    pub fista: FistaConfig,
    pub admm: AdmmConfig,
    pub padmm: PadmmConfig,
    #[serde(skip)]
    pub x0: Option<DenseMatrix>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iter: 5000,
            tol: 0.001,
            sparsa: SparsaConfig::default(),
            fista: FistaConfig::default(),
            admm: AdmmConfig::default(),
            padmm: PadmmConfig::default(),
            x0: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let fail = |msg: String| Err(SolverError::InvalidConfig(msg));
        if self.max_iter == 0 {
            return fail("max_iter must be positive".into());
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return fail(format!("tol must be positive and finite, got {}", self.tol));
        }
        let s = &self.sparsa;
        if !(s.eta.is_finite() && s.eta > 1.0) {
            return fail(format!("sparsa.eta must exceed 1, got {}", s.eta));
        }
        if !(s.alpha_min.is_finite() && s.alpha_min > 0.0) || s.alpha_max <= s.alpha_min {
            return fail(format!(
                "sparsa alpha bounds must satisfy 0 < alpha_min < alpha_max, got [{}, {}]",
                s.alpha_min, s.alpha_max
            ));
        }
        if s.max_backtracks == 0 {
            return fail("sparsa.max_backtracks must be positive".into());
        }
        if !(self.fista.lipschitz_margin.is_finite() && self.fista.lipschitz_margin >= 1.0) {
            return fail(format!(
                "fista.lipschitz_margin must be at least 1, got {}",
                self.fista.lipschitz_margin
            ));
        }
        if !(self.admm.rho.is_finite() && self.admm.rho > 0.0) {
            return fail(format!("admm.rho must be positive, got {}", self.admm.rho));
        }
        let sf = self.padmm.step_fraction;
        if !(sf.is_finite() && sf > 0.0 && sf < 1.0) {
            return fail(format!("padmm.step_fraction must lie in (0, 1), got {sf}"));
        }
        Ok(())
    }
}

/// Outcome of a solver run.
#[derive(Clone, Debug)]
pub struct SolverResult {
    pub x_hat: DenseMatrix,
    /// Number of outer iterations performed.
    pub iterations: usize,
    /// Objective value at the initial point and after every outer iteration;
    /// length is always `iterations + 1`.
    pub objective_trace: Vec<f64>,
    pub wall_time_seconds: f64,
    /// Whether the relative-change stopping rule fired before `max_iter`.
    pub converged: bool,
    /// Set by SpaRSA when some iteration exhausted its backtracking budget
    /// and fell back to the safeguarded step. Always false for the others.
    pub backtracking_exhausted: bool,
}

/// The available solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sparsa,
    Fista,
    Admm,
    Padmm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Sparsa,
        Algorithm::Fista,
        Algorithm::Admm,
        Algorithm::Padmm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sparsa => "sparsa",
            Algorithm::Fista => "fista",
            Algorithm::Admm => "admm",
            Algorithm::Padmm => "padmm",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sparsa" => Ok(Algorithm::Sparsa),
            "fista" => Ok(Algorithm::Fista),
            "admm" => Ok(Algorithm::Admm),
            "padmm" => Ok(Algorithm::Padmm),
            other => Err(format!(
                "unknown algorithm {other:?} (expected sparsa, fista, admm or padmm)"
            )),
        }
    }
}

/// Runs the selected algorithm on the problem.
pub fn solve(
    problem: &Problem,
    config: &SolverConfig,
    algorithm: Algorithm,
) -> Result<SolverResult, SolverError> {
    match algorithm {
        Algorithm::Sparsa => sparsa::solve(problem, config),
        Algorithm::Fista => fista::solve(problem, config),
        Algorithm::Admm => admm::solve(problem, config),
        Algorithm::Padmm => padmm::solve(problem, config),
    }
}

/// The composite objective `0.5 * ||A X - Y||_F^2 + Phi(X)`. Errors when the
/// iterate shape does not match the problem.
pub fn objective(problem: &Problem, x: &DenseMatrix) -> Result<f64, SolverError> {
    let expected = problem.estimate_shape();
    if x.shape() != expected {
        return Err(SolverError::IterateShape {
            got_rows: x.rows(),
            got_cols: x.cols(),
            rows: expected.0,
            cols: expected.1,
        });
    }
    let residual = linalg::matmul(&problem.a, x)?.sub(&problem.y);
    let fit = 0.5 * residual.frobenius_norm().powi(2);
    Ok(fit + oscar_value(&x.to_vector(), problem.params))
}

/// Outcome of the relative-change stopping test.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceCheck {
    pub converged: bool,
    /// Set when the new iterate is exactly zero, which makes the relative
    /// change undefined; the test then reports not converged.
    pub degenerate_zero: bool,
}

/// The shared stopping rule: `||X_next - X_prev||_F / ||X_next||_F <= tol`.
pub fn converged(x_prev: &DenseMatrix, x_next: &DenseMatrix, tol: f64) -> ConvergenceCheck {
    assert_eq!(
        x_prev.shape(),
        x_next.shape(),
        "shape mismatch in converged"
    );
    let denom = x_next.frobenius_norm();
    if denom == 0.0 {
        return ConvergenceCheck {
            converged: false,
            degenerate_zero: true,
        };
    }
    ConvergenceCheck {
        converged: x_next.sub(x_prev).frobenius_norm() / denom <= tol,
        degenerate_zero: false,
    }
}

/// Gradient of the smooth part: `A^T (A X - Y)`.
pub(crate) fn gradient(problem: &Problem, x: &DenseMatrix) -> Result<DenseMatrix, SolverError> {
    let residual = linalg::matmul(&problem.a, x)?.sub(&problem.y);
    Ok(linalg::transpose_matmul(&problem.a, &residual)?)
}

/// Resolves the starting iterate: the configured warm start (validated
/// against the problem shape) or the zero matrix.
pub(crate) fn initial_iterate(
    problem: &Problem,
    config: &SolverConfig,
) -> Result<DenseMatrix, SolverError> {
    let (n, d) = problem.estimate_shape();
    match &config.x0 {
        Some(x0) => {
            if x0.shape() != (n, d) {
                return Err(SolverError::IterateShape {
                    got_rows: x0.rows(),
                    got_cols: x0.cols(),
                    rows: n,
                    cols: d,
                });
            }
            Ok(x0.clone())
        }
        None => Ok(DenseMatrix::zeros(n, d)),
    }
}

/// Evaluates the objective and rejects non-finite values with a diagnostic.
pub(crate) fn objective_checked(
    problem: &Problem,
    x: &DenseMatrix,
    iteration: usize,
) -> Result<f64, SolverError> {
    let f = objective(problem, x)?;
    if !f.is_finite() {
        return Err(SolverError::NonFiniteObjective { iteration });
    }
    Ok(f)
}
