//! Support-restricted least-squares debiasing.
//!
//! Solvers shrink magnitudes as a side effect of regularization. Debiasing
//! removes that bias while keeping the recovered support: for each column
//! `j` of the estimate, the entries flagged as nonzero are refit by solving
//! the restricted normal equations `A_S^T A_S x = A_S^T y_j` with conjugate
//! gradients, where `A_S` keeps only the support columns. Entries outside
//! the support stay exactly zero.

use thiserror::Error;

use crate::linalg::{conjugate_gradient, DenseMatrix, DenseVector, LinalgError};

#[derive(Debug, Error)]
pub enum DebiasError {
    #[error("A has {a_rows} rows but Y has {y_rows}")]
    ObservationRows { a_rows: usize, y_rows: usize },
    #[error("estimate is {got_rows}x{got_cols} but A and Y imply {rows}x{cols}")]
    EstimateShape {
        got_rows: usize,
        got_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("support threshold must be nonnegative and finite, got {0}")]
    InvalidThreshold(f64),
    #[error("cg tolerance must be nonnegative and finite, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Boolean mask over matrix entries, same shape as the estimate it was
/// derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportMask {
    rows: usize,
    cols: usize,
    mask: Vec<bool>,
}

impl SupportMask {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        self.mask[i + j * self.rows]
    }

    /// Number of flagged entries.
    pub fn nnz(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Row indices flagged in column `j`.
    pub fn column_indices(&self, j: usize) -> Vec<usize> {
        assert!(j < self.cols, "column {j} out of bounds");
        (0..self.rows)
            .filter(|&i| self.mask[i + j * self.rows])
            .collect()
    }
}

/// Entries with `|x_ij| > eps`. With `eps = 0` exactly the nonzero entries
/// are flagged, which matches the exact zeros produced by the prox.
pub fn support(x: &DenseMatrix, eps: f64) -> Result<SupportMask, DebiasError> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(DebiasError::InvalidThreshold(eps));
    }
    Ok(SupportMask {
        rows: x.rows(),
        cols: x.cols(),
        mask: x.data().iter().map(|v| v.abs() > eps).collect(),
    })
}

/// Debiasing options. `cg_max_iter = None` caps each column's CG run at the
/// size of that column's support, the dimension of the restricted system.
#[derive(Clone, Copy, Debug)]
pub struct DebiasConfig {
    pub eps: f64,
    pub cg_tol: f64,
    pub cg_max_iter: Option<usize>,
}

impl Default for DebiasConfig {
    fn default() -> Self {
        DebiasConfig {
            eps: 0.0,
            cg_tol: 1e-8,
            cg_max_iter: None,
        }
    }
}

/// Result of [`debias`].
#[derive(Clone, Debug)]
pub struct DebiasOutcome {
    pub x: DenseMatrix,
    /// Per-column CG convergence flags; a false entry means the column kept
    /// the best iterate found within the iteration budget.
    pub column_converged: Vec<bool>,
}

/// Refits the magnitudes of `x_tilde` on its own support by per-column
/// restricted least squares; see the module docs. Off-support entries of the
/// result are exactly zero, and an empty support column stays zero.
pub fn debias(
    a: &DenseMatrix,
    y: &DenseMatrix,
    x_tilde: &DenseMatrix,
    config: &DebiasConfig,
) -> Result<DebiasOutcome, DebiasError> {
    if a.rows() != y.rows() {
        return Err(DebiasError::ObservationRows {
            a_rows: a.rows(),
            y_rows: y.rows(),
        });
    }
    if x_tilde.shape() != (a.cols(), y.cols()) {
        return Err(DebiasError::EstimateShape {
            got_rows: x_tilde.rows(),
            got_cols: x_tilde.cols(),
            rows: a.cols(),
            cols: y.cols(),
        });
    }
    if !(config.cg_tol.is_finite() && config.cg_tol >= 0.0) {
        return Err(DebiasError::InvalidTolerance(config.cg_tol));
    }
    let mask = support(x_tilde, config.eps)?;

    let m = a.rows();
    let mut out = DenseMatrix::zeros(x_tilde.rows(), x_tilde.cols());
    let mut column_converged = vec![true; x_tilde.cols()];

    for (j, converged) in column_converged.iter_mut().enumerate() {
        let support_indices = mask.column_indices(j);
        if support_indices.is_empty() {
            continue;
        }
        let k = support_indices.len();

        // The restricted Gram operator v -> A_S^T A_S v, applied without
        // materializing A_S: first t = A_S v in observation space, then one
        // dot product per support column.
        let apply = |v: &DenseVector| {
            let mut t = vec![0.0; m];
            for (pos, &col_idx) in support_indices.iter().enumerate() {
                let col = a.col(col_idx);
                let vk = v[pos];
                for (ti, ci) in t.iter_mut().zip(col) {
                    *ti += ci * vk;
                }
            }
            let mut out = Vec::with_capacity(k);
            for &col_idx in &support_indices {
                let col = a.col(col_idx);
                out.push(col.iter().zip(&t).map(|(c, ti)| c * ti).sum());
            }
            DenseVector::from_raw(out)
        };

        let y_col = y.col(j);
        let rhs = DenseVector::from_raw(
            support_indices
                .iter()
                .map(|&col_idx| a.col(col_idx).iter().zip(y_col).map(|(c, yi)| c * yi).sum())
                .collect(),
        );

        let max_iter = config.cg_max_iter.unwrap_or(k);
        let outcome =
            conjugate_gradient(apply, &rhs, &DenseVector::zeros(k), config.cg_tol, max_iter)?;
        *converged = outcome.converged;

        let out_col = out.col_mut(j);
        for (pos, &row_idx) in support_indices.iter().enumerate() {
            out_col[row_idx] = outcome.x[pos];
        }
    }

    Ok(DebiasOutcome {
        x: out,
        column_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_thresholding() {
        let x = DenseMatrix::from_rows(&[[0.0, 0.5], [-0.1, 2.0]]);
        let s0 = support(&x, 0.0).unwrap();
        assert_eq!(s0.nnz(), 3);
        assert!(!s0.contains(0, 0));
        assert!(s0.contains(1, 0));

        let s_quarter = support(&x, 0.25).unwrap();
        assert_eq!(s_quarter.nnz(), 2);
        assert!(!s_quarter.contains(1, 0));

        assert!(matches!(
            support(&x, -1.0),
            Err(DebiasError::InvalidThreshold(_))
        ));
    }

    #[test]
    fn empty_support_returns_zero_matrix() {
        let a = DenseMatrix::identity(3);
        let y = DenseMatrix::from_rows(&[[1.0], [2.0], [3.0]]);
        let x_tilde = DenseMatrix::zeros(3, 1);
        let out = debias(&a, &y, &x_tilde, &DebiasConfig::default()).unwrap();
        assert_eq!(out.x, DenseMatrix::zeros(3, 1));
        assert_eq!(out.column_converged, vec![true]);
    }

    #[test]
    fn identity_sensing_recovers_observations_on_support() {
        // With A = I the restricted fit returns y on the support and zero
        // elsewhere.
        let a = DenseMatrix::identity(3);
        let y = DenseMatrix::from_rows(&[[1.0], [2.0], [3.0]]);
        let x_tilde = DenseMatrix::from_rows(&[[0.4], [0.0], [0.9]]);
        let out = debias(&a, &y, &x_tilde, &DebiasConfig::default()).unwrap();
        let got = out.x;
        assert!((got[(0, 0)] - 1.0).abs() < 1e-10);
        assert_eq!(got[(1, 0)], 0.0);
        assert!((got[(2, 0)] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let a = DenseMatrix::zeros(3, 2);
        let y = DenseMatrix::zeros(4, 1);
        let x = DenseMatrix::zeros(2, 1);
        assert!(matches!(
            debias(&a, &y, &x, &DebiasConfig::default()),
            Err(DebiasError::ObservationRows { .. })
        ));

        let y = DenseMatrix::zeros(3, 1);
        let x_bad = DenseMatrix::zeros(3, 1);
        assert!(matches!(
            debias(&a, &y, &x_bad, &DebiasConfig::default()),
            Err(DebiasError::EstimateShape { .. })
        ));
    }
}
