//! Dense column-major matrices and the small set of kernels the rest of the
//! crate builds on: products, norms, vectorization, a power-method spectral
//! norm estimate, conjugate gradients, a Cholesky factorization and CSV I/O.
//!
//! Matrices are stored column-major so that flattening a matrix into a long
//! vector (and back) is a straight copy of the backing buffer. All public
//! constructors reject non-finite entries; the numeric kernels may therefore
//! assume finite inputs.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::ops::{Index, IndexMut};
use std::path::Path;

use thiserror::Error;

/// Default relative tolerance for [`spectral_norm_estimate`].
pub const SPECTRAL_NORM_TOL: f64 = 1e-6;
/// Default iteration cap for [`spectral_norm_estimate`].
pub const SPECTRAL_NORM_MAX_ITER: usize = 500;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: left operand is {left_rows}x{left_cols}, right operand is {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("data length {len} does not match shape {rows}x{cols}")]
    LengthMismatch {
        len: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("vector length must be positive")]
    EmptyVector,
    #[error("non-finite entry at linear index {index}")]
    NonFinite { index: usize },
    #[error("conjugate gradient produced a non-finite value at iteration {iteration}")]
    NonFiniteIteration { iteration: usize },
    #[error("matrix is not positive definite: pivot {pivot:e} at column {col}")]
    NotPositiveDefinite { pivot: f64, col: usize },
    #[error("{path}: line {line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Dense matrix with entries stored column by column.
///
/// Entry `(i, j)` lives at `data[i + j * rows]`. Shapes are always positive
/// in both dimensions and every entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from a column-major buffer, validating shape, length
    /// and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::LengthMismatch {
                len: data.len(),
                rows,
                cols,
            });
        }
        check_finite(&data)?;
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix row by row; mostly a convenience for tests and docs.
    ///
    /// Panics on an empty row list, zero-width rows or non-finite entries.
    pub fn from_rows<const C: usize>(rows: &[[f64; C]]) -> Self {
        assert!(
            !rows.is_empty() && C > 0,
            "matrix dimensions must be positive"
        );
        let mut data = vec![0.0; rows.len() * C];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                data[i + j * rows.len()] = v;
            }
        }
        DenseMatrix {
            rows: rows.len(),
            cols: C,
            data,
        }
    }

    /// All-zero matrix. Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// The `n x n` identity. Panics if `n` is zero.
    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i + i * n] = 1.0;
        }
        m
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Column-major view of the entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[f64] {
        assert!(
            j < self.cols,
            "column {j} out of bounds for {} columns",
            self.cols
        );
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Column `j` as a mutable contiguous slice.
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        assert!(
            j < self.cols,
            "column {j} out of bounds for {} columns",
            self.cols
        );
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Flattens into a vector by stacking columns. Thanks to the column-major
    /// layout this is a plain copy of the backing buffer; [`Self::into_vector`]
    /// performs the same flattening without copying.
    pub fn to_vector(&self) -> DenseVector {
        DenseVector {
            data: self.data.clone(),
        }
    }

    /// Flattening counterpart of [`Self::to_vector`] that consumes the matrix
    /// and reuses its buffer.
    pub fn into_vector(self) -> DenseVector {
        DenseVector { data: self.data }
    }

    /// Entrywise sum; panics on shape mismatch.
    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        DenseMatrix::from_raw(self.rows, self.cols, data)
    }

    /// Entrywise difference; panics on shape mismatch.
    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sub");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        DenseMatrix::from_raw(self.rows, self.cols, data)
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: f64) -> DenseMatrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        DenseMatrix::from_raw(self.rows, self.cols, data)
    }

    /// Frobenius inner product `sum_ij self_ij * other_ij`; panics on shape
    /// mismatch.
    pub fn frob_inner(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in frob_inner");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Frobenius norm, the entrywise l2 norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise l1 norm.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Writes the matrix as CSV, one matrix row per line.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<(), LinalgError> {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(',');
                }
                // f64 Display is shortest round-trip, so reading the file
                // back reproduces the exact bit pattern.
                let _ = write!(out, "{}", self.data[i + j * self.rows]);
            }
            out.push('\n');
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Reads a matrix written by [`Self::write_csv`]: one row per line,
    /// comma-separated, equal row lengths.
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self, LinalgError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let text = fs::read_to_string(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for field in line.split(',') {
                let value: f64 = field.trim().parse().map_err(|_| LinalgError::Csv {
                    path: display.clone(),
                    line: lineno + 1,
                    message: format!("cannot parse {:?} as a number", field.trim()),
                })?;
                row.push(value);
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(LinalgError::Csv {
                        path: display,
                        line: lineno + 1,
                        message: format!(
                            "expected {} fields per line, found {}",
                            first.len(),
                            row.len()
                        ),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(LinalgError::Csv {
                path: display,
                line: 1,
                message: "no data rows".to_string(),
            });
        }
        let (r, c) = (rows.len(), rows[0].len());
        let mut data = vec![0.0; r * c];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[i + j * r] = v;
            }
        }
        DenseMatrix::from_vec(r, c, data)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i + j * self.rows]
    }
}

/// Dense vector with finite entries and positive length.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    /// Builds a vector, validating length and finiteness.
    pub fn from_vec(data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.is_empty() {
            return Err(LinalgError::EmptyVector);
        }
        check_finite(&data)?;
        Ok(DenseVector { data })
    }

    /// All-zero vector. Panics if `n` is zero.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "vector length must be positive");
        DenseVector { data: vec![0.0; n] }
    }

    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        DenseVector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Reshapes into a `rows x cols` matrix by splitting into columns; the
    /// inverse of [`DenseMatrix::to_vector`]. Errors if the length does not
    /// factor as `rows * cols`.
    pub fn into_matrix(self, rows: usize, cols: usize) -> Result<DenseMatrix, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyShape { rows, cols });
        }
        if self.data.len() != rows * cols {
            return Err(LinalgError::LengthMismatch {
                len: self.data.len(),
                rows,
                cols,
            });
        }
        Ok(DenseMatrix::from_raw(rows, cols, self.data))
    }

    pub fn add(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "length mismatch in add");
        DenseVector::from_raw(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "length mismatch in sub");
        DenseVector::from_raw(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> DenseVector {
        DenseVector::from_raw(self.data.iter().map(|a| a * factor).collect())
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        assert_eq!(self.len(), other.len(), "length mismatch in dot");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

fn check_finite(data: &[f64]) -> Result<(), LinalgError> {
    for (index, v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(LinalgError::NonFinite { index });
        }
    }
    Ok(())
}

/// `A * B`. Errors when the inner dimensions disagree.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch {
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    let (m, n, p) = (a.rows, a.cols, b.cols);
    let mut data = vec![0.0; m * p];
    // Accumulate one column of the product at a time: for fixed j, the
    // update c[., j] += a[., k] * b[k, j] walks contiguous memory.
    for j in 0..p {
        let out = &mut data[j * m..(j + 1) * m];
        for k in 0..n {
            let b_kj = b.data[k + j * n];
            if b_kj == 0.0 {
                continue;
            }
            let a_col = &a.data[k * m..(k + 1) * m];
            for i in 0..m {
                out[i] += a_col[i] * b_kj;
            }
        }
    }
    Ok(DenseMatrix::from_raw(m, p, data))
}

/// `A^T * B` without materializing the transpose. Errors when the row counts
/// disagree.
pub fn transpose_matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if a.rows != b.rows {
        return Err(LinalgError::DimensionMismatch {
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    let (m, n, p) = (a.rows, a.cols, b.cols);
    let mut data = vec![0.0; n * p];
    // Entry (k, j) of the product is the dot product of column k of A with
    // column j of B, both contiguous.
    for j in 0..p {
        let b_col = &b.data[j * m..(j + 1) * m];
        for k in 0..n {
            let a_col = &a.data[k * m..(k + 1) * m];
            let mut acc = 0.0;
            for i in 0..m {
                acc += a_col[i] * b_col[i];
            }
            data[k + j * n] = acc;
        }
    }
    Ok(DenseMatrix::from_raw(n, p, data))
}

/// Result of [`spectral_norm_estimate`].
#[derive(Clone, Copy, Debug)]
pub struct SpectralEstimate {
    /// Estimated largest singular value.
    pub value: f64,
    /// Whether the relative change between sweeps dropped below the tolerance.
    pub converged: bool,
    /// Set when the input is exactly zero, in which case `value` is 0.
    pub zero_matrix: bool,
}

/// Estimates the largest singular value of `a` by power iteration on
/// `A^T A`, starting from the deterministic normalized all-ones vector.
///
/// Stops when the estimate changes by less than `tol` relative or after
/// `max_iter` sweeps, whichever comes first; `converged` records which.
pub fn spectral_norm_estimate(a: &DenseMatrix, tol: f64, max_iter: usize) -> SpectralEstimate {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    if a.data.iter().all(|&v| v == 0.0) {
        return SpectralEstimate {
            value: 0.0,
            converged: true,
            zero_matrix: true,
        };
    }
    let n = a.cols;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma_prev = 0.0;
    let mut restart = 0;
    for iter in 0..max_iter {
        // w = A v, u = A^T w; with ||v|| = 1, sigma = ||w|| estimates the
        // top singular value and u points along the dominant right vector.
        let w = apply_columns(a, &v);
        let sigma = norm_slice(&w);
        let u = apply_columns_transposed(a, &w);
        let un = norm_slice(&u);
        if un == 0.0 {
            // The iterate landed in the null space (possible only for very
            // special matrices); restart from the next basis vector.
            v.iter_mut().for_each(|x| *x = 0.0);
            v[restart % n] = 1.0;
            restart += 1;
            continue;
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / un;
        }
        if iter > 0 && (sigma - sigma_prev).abs() <= tol * sigma {
            return SpectralEstimate {
                value: sigma,
                converged: true,
                zero_matrix: false,
            };
        }
        sigma_prev = sigma;
    }
    SpectralEstimate {
        value: sigma_prev,
        converged: false,
        zero_matrix: false,
    }
}

fn apply_columns(a: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.rows];
    for (k, &vk) in v.iter().enumerate() {
        let col = &a.data[k * a.rows..(k + 1) * a.rows];
        for i in 0..a.rows {
            out[i] += col[i] * vk;
        }
    }
    out
}

fn apply_columns_transposed(a: &DenseMatrix, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.cols];
    for (k, slot) in out.iter_mut().enumerate() {
        let col = &a.data[k * a.rows..(k + 1) * a.rows];
        *slot = col.iter().zip(w).map(|(c, x)| c * x).sum();
    }
    out
}

fn norm_slice(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Result of [`conjugate_gradient`].
#[derive(Clone, Debug)]
pub struct CgOutcome {
    /// Approximate solution: the final iterate when converged, otherwise the
    /// iterate with the smallest residual norm seen.
    pub x: DenseVector,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm `||b - A x||` of the returned iterate.
    pub residual_norm: f64,
}

/// Conjugate gradient for `A x = b` with a symmetric positive semidefinite
/// operator given as a closure.
///
/// Stops when `||b - A x|| <= tol * ||b||`. A zero right-hand side returns
/// the zero vector immediately. Errors if the recurrence produces a
/// non-finite value.
pub fn conjugate_gradient<F>(
    apply: F,
    b: &DenseVector,
    x0: &DenseVector,
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome, LinalgError>
where
    F: Fn(&DenseVector) -> DenseVector,
{
    assert_eq!(b.len(), x0.len(), "rhs and initial guess lengths differ");
    assert!(
        tol >= 0.0 && tol.is_finite(),
        "tolerance must be nonnegative"
    );
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: DenseVector::zeros(b.len()),
            iterations: 0,
            converged: true,
            residual_norm: 0.0,
        });
    }
    let threshold = tol * b_norm;
    let mut x = x0.clone();
    let mut r = b.sub(&apply(&x));
    assert_eq!(r.len(), b.len(), "operator changed the vector length");
    let mut rs = r.dot(&r);
    let mut best = (x.clone(), rs.sqrt());
    if best.1 <= threshold {
        return Ok(CgOutcome {
            residual_norm: best.1,
            x,
            iterations: 0,
            converged: true,
        });
    }
    let mut p = r.clone();
    for iteration in 1..=max_iter {
        let ap = apply(&p);
        let pap = p.dot(&ap);
        if !pap.is_finite() || !rs.is_finite() {
            return Err(LinalgError::NonFiniteIteration { iteration });
        }
        if pap <= 0.0 {
            // Direction of zero (or negative, numerically) curvature: the
            // operator is only semidefinite here and CG cannot proceed.
            break;
        }
        let alpha = rs / pap;
        x = x.add(&p.scale(alpha));
        r = r.sub(&ap.scale(alpha));
        let rs_next = r.dot(&r);
        if !rs_next.is_finite() {
            return Err(LinalgError::NonFiniteIteration { iteration });
        }
        let r_norm = rs_next.sqrt();
        if r_norm < best.1 {
            best = (x.clone(), r_norm);
        }
        if r_norm <= threshold {
            return Ok(CgOutcome {
                x,
                iterations: iteration,
                converged: true,
                residual_norm: r_norm,
            });
        }
        let beta = rs_next / rs;
        p = r.add(&p.scale(beta));
        rs = rs_next;
    }
    Ok(CgOutcome {
        x: best.0,
        iterations: max_iter,
        converged: false,
        residual_norm: best.1,
    })
}

/// Lower-triangular Cholesky factorization of a symmetric positive definite
/// matrix, with forward/backward substitution solves.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    /// Factors `a = L L^T`. Errors if `a` is not square or a pivot fails to
    /// be positive.
    pub fn factor(a: &DenseMatrix) -> Result<Self, LinalgError> {
        if a.rows != a.cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: a.rows,
                left_cols: a.cols,
                right_rows: a.cols,
                right_cols: a.rows,
            });
        }
        let n = a.rows;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a.data[j + j * n];
            for k in 0..j {
                let ljk = l.data[j + k * n];
                diag -= ljk * ljk;
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(LinalgError::NotPositiveDefinite {
                    pivot: diag,
                    col: j,
                });
            }
            let ljj = diag.sqrt();
            l.data[j + j * n] = ljj;
            for i in (j + 1)..n {
                let mut v = a.data[i + j * n];
                for k in 0..j {
                    v -= l.data[i + k * n] * l.data[j + k * n];
                }
                l.data[i + j * n] = v / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    /// Solves `A X = B` for every column of `B`; panics if the row count of
    /// `b` does not match the factored matrix.
    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.l.rows;
        assert_eq!(b.rows, n, "rhs has {} rows, factor is {n}x{n}", b.rows);
        let mut out = b.clone();
        for j in 0..b.cols {
            let col = out.col_mut(j);
            // Forward substitution: L z = b.
            for i in 0..n {
                let mut v = col[i];
                for (k, &ck) in col.iter().enumerate().take(i) {
                    v -= self.l.data[i + k * n] * ck;
                }
                col[i] = v / self.l.data[i + i * n];
            }
            // Backward substitution: L^T x = z. The entries of L^T's row i
            // above the diagonal sit contiguously in column i of L.
            for i in (0..n).rev() {
                let below = &self.l.data[i * n + i + 1..(i + 1) * n];
                let mut v = col[i];
                for (lk, ck) in below.iter().zip(&col[i + 1..]) {
                    v -= lk * ck;
                }
                col[i] = v / self.l.data[i + i * n];
            }
        }
        out
    }
}
