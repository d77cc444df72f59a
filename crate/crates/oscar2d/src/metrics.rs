//! Recovery metrics comparing an estimate against the ground truth:
//! mean absolute error, mean squared error and the pattern error rate
//! (fraction of entries whose zero/nonzero status disagrees).

use thiserror::Error;

use crate::linalg::DenseMatrix;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("estimate is {got_rows}x{got_cols} but the truth is {rows}x{cols}")]
    ShapeMismatch {
        got_rows: usize,
        got_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("elapsed time must be nonnegative and finite, got {0}")]
    InvalidTime(f64),
}

/// The four benchmark metrics for one (estimate, truth) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricReport {
    pub mae: f64,
    pub mse: f64,
    /// Pattern error rate in `[0, 1]`.
    pub per: f64,
    pub time_seconds: f64,
}

fn check_shapes(x: &DenseMatrix, truth: &DenseMatrix) -> Result<(), MetricsError> {
    if x.shape() != truth.shape() {
        return Err(MetricsError::ShapeMismatch {
            got_rows: x.rows(),
            got_cols: x.cols(),
            rows: truth.rows(),
            cols: truth.cols(),
        });
    }
    Ok(())
}

/// Mean absolute error `||X - E||_1 / (rows * cols)`.
pub fn mae(x: &DenseMatrix, truth: &DenseMatrix) -> Result<f64, MetricsError> {
    check_shapes(x, truth)?;
    let n = (x.rows() * x.cols()) as f64;
    Ok(x.sub(truth).l1_norm() / n)
}

/// Mean squared error `||X - E||_F^2 / (rows * cols)`.
pub fn mse(x: &DenseMatrix, truth: &DenseMatrix) -> Result<f64, MetricsError> {
    check_shapes(x, truth)?;
    let n = (x.rows() * x.cols()) as f64;
    Ok(x.sub(truth).frobenius_norm().powi(2) / n)
}

/// Pattern error rate: the fraction of entries whose zero/nonzero status
/// differs between estimate and truth. Zero status means exactly zero.
pub fn per(x: &DenseMatrix, truth: &DenseMatrix) -> Result<f64, MetricsError> {
    check_shapes(x, truth)?;
    let n = (x.rows() * x.cols()) as f64;
    let disagreements = x
        .data()
        .iter()
        .zip(truth.data())
        .filter(|(a, b)| (**a != 0.0) != (**b != 0.0))
        .count();
    Ok(disagreements as f64 / n)
}

/// Bundles all four metrics; `time_seconds` is measured by the caller around
/// whatever work is being assessed.
pub fn evaluate(
    x: &DenseMatrix,
    truth: &DenseMatrix,
    time_seconds: f64,
) -> Result<MetricReport, MetricsError> {
    if !(time_seconds.is_finite() && time_seconds >= 0.0) {
        return Err(MetricsError::InvalidTime(time_seconds));
    }
    Ok(MetricReport {
        mae: mae(x, truth)?,
        mse: mse(x, truth)?,
        per: per(x, truth)?,
        time_seconds,
    })
}
