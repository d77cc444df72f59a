//! The 2OSCAR regularizer and its exact proximity operator.
//!
//! For a matrix `X` with `N = rows * cols` entries, the regularizer is
//!
//! ```text
//! Phi(X) = lambda1 * sum_i |x_i| + lambda2 * sum_{i<j} max(|x_i|, |x_j|)
//! ```
//!
//! with `x = vec(X)`. Sorting the magnitudes in nonincreasing order shows
//! that `Phi` is a weighted sorted l1 norm: the entry with the k-th largest
//! magnitude (1-based) is charged the weight `lambda1 + lambda2 * (N - k)`,
//! because it realizes the max against exactly the `N - k` entries that are
//! smaller. The proximity operator therefore reduces to the prox of a sorted
//! weighted l1 norm, computed exactly by sorting, subtracting the weights
//! and projecting onto the nonincreasing cone with the pool adjacent
//! violators (PAV) algorithm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{DenseMatrix, DenseVector};

#[derive(Debug, Error)]
pub enum ProxError {
    #[error("regularization parameters must be finite and nonnegative: lambda1={lambda1}, lambda2={lambda2}")]
    InvalidParams { lambda1: f64, lambda2: f64 },
    #[error("weight vector must be nonempty")]
    EmptyWeights,
    #[error("weights must be nonincreasing and nonnegative (violated at index {index})")]
    InvalidWeights { index: usize },
    #[error("weight vector has length {weights} but the input has length {input}")]
    LengthMismatch { weights: usize, input: usize },
    #[error("prox scale alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
}

/// Nonnegative regularization strengths for the l1 term (`lambda1`) and the
/// pairwise l-infinity term (`lambda2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscarParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl OscarParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self, ProxError> {
        let p = OscarParams { lambda1, lambda2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProxError> {
        if !(self.lambda1.is_finite() && self.lambda2.is_finite())
            || self.lambda1 < 0.0
            || self.lambda2 < 0.0
        {
            return Err(ProxError::InvalidParams {
                lambda1: self.lambda1,
                lambda2: self.lambda2,
            });
        }
        Ok(())
    }
}

/// A nonincreasing, nonnegative weight sequence, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self, ProxError> {
        if w.is_empty() {
            return Err(ProxError::EmptyWeights);
        }
        for (index, pair) in w.windows(2).enumerate() {
            if pair[1] > pair[0] {
                return Err(ProxError::InvalidWeights { index: index + 1 });
            }
        }
        for (index, &v) in w.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(ProxError::InvalidWeights { index });
            }
        }
        Ok(WeightVector { w })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Multiplies every weight by a positive factor; monotonicity and sign
    /// are preserved, so no revalidation is needed.
    pub fn scale(&self, factor: f64) -> WeightVector {
        assert!(
            factor > 0.0 && factor.is_finite(),
            "scale factor must be positive"
        );
        WeightVector {
            w: self.w.iter().map(|v| v * factor).collect(),
        }
    }
}

/// The sorted-l1 weights `w_k = lambda1 + lambda2 * (n - k)` for
/// `k = 1, ..., n`. Errors when `n` is zero or the parameters are invalid.
pub fn oscar_weights(n: usize, params: OscarParams) -> Result<WeightVector, ProxError> {
    params.validate()?;
    if n == 0 {
        return Err(ProxError::EmptyWeights);
    }
    let w = (1..=n)
        .map(|k| params.lambda1 + params.lambda2 * (n - k) as f64)
        .collect();
    Ok(WeightVector { w })
}

/// Evaluates the regularizer on a flattened input via the sorted weighted
/// l1 form. `params` is assumed valid (see [`OscarParams::new`]).
pub fn oscar_value(x: &DenseVector, params: OscarParams) -> f64 {
    let n = x.len();
    let mut mags: Vec<f64> = x.as_slice().iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));
    mags.iter()
        .enumerate()
        .map(|(k, &m)| (params.lambda1 + params.lambda2 * (n - 1 - k) as f64) * m)
        .sum()
}

/// Euclidean projection onto the cone of nonincreasing sequences, computed
/// by the pool adjacent violators algorithm in one left-to-right sweep.
pub fn pav_nonincreasing(z: &DenseVector) -> DenseVector {
    DenseVector::from_raw(pav_nonincreasing_slice(z.as_slice()))
}

fn pav_nonincreasing_slice(z: &[f64]) -> Vec<f64> {
    // Stack of maximal blocks, each represented by (sum, count). A new
    // element starts its own block; while the block mean to its left is
    // strictly smaller (a violation of nonincreasing order), the blocks
    // merge and take their pooled mean.
    let mut sums: Vec<f64> = Vec::with_capacity(z.len());
    let mut counts: Vec<usize> = Vec::with_capacity(z.len());
    for &zi in z {
        let mut sum = zi;
        let mut count = 1usize;
        while let Some((&prev_sum, &prev_count)) = sums.last().zip(counts.last()) {
            if prev_sum * count as f64 >= sum * prev_count as f64 {
                break; // prev mean >= current mean: feasible, stop merging
            }
            sum += prev_sum;
            count += prev_count;
            sums.pop();
            counts.pop();
        }
        sums.push(sum);
        counts.push(count);
    }
    let mut out = Vec::with_capacity(z.len());
    for (sum, count) in sums.iter().zip(&counts) {
        let mean = sum / *count as f64;
        out.extend(std::iter::repeat_n(mean, *count));
    }
    out
}

/// Proximity operator of the weighted sorted l1 norm
/// `x -> sum_k w_k |x|_(k)` (magnitudes sorted nonincreasing, `w`
/// nonincreasing and nonnegative): returns the minimizer of
/// `0.5 * ||x - v||^2 + sum_k w_k |x|_(k)`.
pub fn prox_sorted_weighted_l1(
    v: &DenseVector,
    w: &WeightVector,
) -> Result<DenseVector, ProxError> {
    if v.len() != w.len() {
        return Err(ProxError::LengthMismatch {
            weights: w.len(),
            input: v.len(),
        });
    }
    let n = v.len();
    let vs = v.as_slice();
    // Stable sort of indices by magnitude, largest first; stability pins the
    // tie order to the original index order, keeping results deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vs[j].abs().partial_cmp(&vs[i].abs()).expect("finite input"));
    // In the sorted domain the prox is the nonincreasing projection of
    // (|v|_(k) - w_k), clamped at zero.
    let z: Vec<f64> = order
        .iter()
        .zip(w.as_slice())
        .map(|(&idx, wk)| vs[idx].abs() - wk)
        .collect();
    let pooled = pav_nonincreasing_slice(&z);
    let mut out = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        let magnitude = pooled[rank].max(0.0);
        out[idx] = sign(vs[idx]) * magnitude;
    }
    Ok(DenseVector::from_raw(out))
}

/// Proximity operator of `Phi / alpha` on matrices: flattens column-major,
/// applies the sorted weighted l1 prox with weights `w / alpha` and reshapes
/// back. Errors when `alpha` is not positive and finite or the parameters
/// are invalid.
pub fn prox_2oscar(
    z: &DenseMatrix,
    params: OscarParams,
    alpha: f64,
) -> Result<DenseMatrix, ProxError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(ProxError::InvalidAlpha(alpha));
    }
    let (rows, cols) = z.shape();
    let w = oscar_weights(rows * cols, params)?.scale(1.0 / alpha);
    let x = prox_sorted_weighted_l1(&z.to_vector(), &w)?;
    Ok(x.into_matrix(rows, cols)
        .expect("prox preserves the entry count"))
}

fn sign(v: f64) -> f64 {
    // f64::signum maps 0.0 to 1.0; the prox needs sign(0) = 0.
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}
