//! Reference implementations used as oracles by the integration tests.
//!
//! Everything here is deliberately simple, slow and structurally unrelated
//! to the library code it checks: plain nested `Vec` containers, explicit
//! loops, exhaustive enumeration where feasible. Oracles must stay
//! independent of the implementation under test.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use oscar2d::DenseMatrix;

/// `A * B` by the definition: triple loop over row-major nested vectors.
pub fn matmul_oracle(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (m, n, p) = (a.len(), b.len(), b[0].len());
    let mut c = vec![vec![0.0; p]; m];
    for i in 0..m {
        assert_eq!(a[i].len(), n);
        for j in 0..p {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[i][k] * b[k][j];
            }
            c[i][j] = acc;
        }
    }
    c
}

pub fn transpose_oracle(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (m, n) = (a.len(), a[0].len());
    let mut t = vec![vec![0.0; m]; n];
    for i in 0..m {
        for j in 0..n {
            t[j][i] = a[i][j];
        }
    }
    t
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. Panics on
/// a (numerically) singular matrix; oracle callers use well-conditioned
/// systems.
pub fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = a.len();
    assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        assert!(a[pivot_row][col].abs() > 1e-12, "singular system in oracle");
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in (col + 1)..n {
            let factor = a[row][col] / pivot[col];
            for (ak, pk) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *ak -= factor * pk;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eig_max(mut s: Vec<Vec<f64>>) -> f64 {
    let n = s.len();
    for _sweep in 0..200 {
        let off: f64 = s
            .iter()
            .enumerate()
            .map(|(p, row)| row[p + 1..].iter().map(|v| v * v).sum::<f64>())
            .sum();
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = s[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for row in s.iter_mut() {
                    let (rp, rq) = (row[p], row[q]);
                    row[p] = c * rp - sn * rq;
                    row[q] = sn * rp + c * rq;
                }
                let (top, bottom) = s.split_at_mut(q);
                for (spk, sqk) in top[p].iter_mut().zip(bottom[0].iter_mut()) {
                    let (old_p, old_q) = (*spk, *sqk);
                    *spk = c * old_p - sn * old_q;
                    *sqk = sn * old_p + c * old_q;
                }
            }
        }
    }
    (0..n).map(|i| s[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Largest singular value via the Jacobi eigen-decomposition of `A^T A`.
pub fn spectral_norm_oracle(a: &[Vec<f64>]) -> f64 {
    let at = transpose_oracle(a);
    let ata = matmul_oracle(&at, a);
    jacobi_eig_max(ata).max(0.0).sqrt()
}

/// The regularizer evaluated literally: `l1 * sum |x_i| + l2 * sum_{i<j}
/// max(|x_i|, |x_j|)`, a quadratic-cost double loop.
pub fn oscar_value_pairwise(x: &[f64], l1: f64, l2: f64) -> f64 {
    let mut value = 0.0;
    for &xi in x {
        value += l1 * xi.abs();
    }
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            value += l2 * x[i].abs().max(x[j].abs());
        }
    }
    value
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Exact minimizer of `0.5 ||x - v||^2 + l1 sum |x_i| + l2 sum max-pairs` by
/// exhaustive search.
///
/// The minimizer's magnitudes, read along `|v|` sorted descending, form
/// consecutive constant blocks valued at `max(mean of (|v|_(k) - w_k), 0)`
/// over each block, where `w_k = l1 + l2 (n - k)`. Enumerating all `2^(n-1)`
/// block splits yields a finite candidate set that provably contains the
/// minimizer; scoring every candidate with the literal pairwise objective
/// and keeping the best needs no sorting or pooling machinery from the
/// library.
pub fn prox_oscar_oracle(v: &[f64], l1: f64, l2: f64) -> Vec<f64> {
    let n = v.len();
    assert!(
        (1..=16).contains(&n),
        "enumeration oracle is exponential in n"
    );
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[j].abs().partial_cmp(&v[i].abs()).unwrap());
    let z: Vec<f64> = order
        .iter()
        .enumerate()
        .map(|(k, &idx)| v[idx].abs() - (l1 + l2 * (n - 1 - k) as f64))
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u64..(1 << (n - 1)) {
        // Bit t of the mask places a block boundary between ranks t and t+1.
        let mut x = vec![0.0; n];
        let mut start = 0;
        for t in 0..n {
            if t == n - 1 || (mask >> t) & 1 == 1 {
                let count = (t + 1 - start) as f64;
                let mean = z[start..=t].iter().sum::<f64>() / count;
                let magnitude = mean.max(0.0);
                for r in start..=t {
                    x[order[r]] = sign(v[order[r]]) * magnitude;
                }
                start = t + 1;
            }
        }
        let objective = 0.5
            * x.iter()
                .zip(v)
                .map(|(xi, vi)| (xi - vi) * (xi - vi))
                .sum::<f64>()
            + oscar_value_pairwise(&x, l1, l2);
        if best.as_ref().is_none_or(|(b, _)| objective < *b) {
            best = Some((objective, x));
        }
    }
    best.unwrap().1
}

/// Projection onto nonincreasing sequences by enumerating block partitions:
/// every candidate is piecewise-constant at block means; those with
/// nonincreasing block values are feasible, and the closest feasible
/// candidate is the projection.
pub fn pav_oracle(z: &[f64]) -> Vec<f64> {
    let n = z.len();
    assert!(
        (1..=16).contains(&n),
        "enumeration oracle is exponential in n"
    );
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u64..(1 << (n - 1)) {
        let mut u = vec![0.0; n];
        let mut start = 0;
        let mut prev = f64::INFINITY;
        let mut feasible = true;
        for t in 0..n {
            if t == n - 1 || (mask >> t) & 1 == 1 {
                let mean = z[start..=t].iter().sum::<f64>() / (t + 1 - start) as f64;
                if mean > prev {
                    feasible = false;
                    break;
                }
                for ur in &mut u[start..=t] {
                    *ur = mean;
                }
                prev = mean;
                start = t + 1;
            }
        }
        if !feasible {
            continue;
        }
        let dist = u.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, u));
        }
    }
    best.unwrap().1
}

/// Plain ISTA for the LASSO `0.5 ||A x - y||^2 + l1 ||x||_1` with the safe
/// step `1 / ||A||_F^2`, iterated until the relative change is negligible.
pub fn ista_lasso(a: &[Vec<f64>], y: &[f64], l1: f64, max_iter: usize) -> Vec<f64> {
    let (m, n) = (a.len(), a[0].len());
    let lip: f64 = a.iter().flatten().map(|v| v * v).sum();
    let mut x = vec![0.0; n];
    for _ in 0..max_iter {
        let mut residual = vec![0.0; m];
        for i in 0..m {
            residual[i] = a[i].iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<f64>() - y[i];
        }
        let mut x_next = vec![0.0; n];
        let mut delta = 0.0;
        let mut norm = 0.0;
        for j in 0..n {
            let grad: f64 = (0..m).map(|i| a[i][j] * residual[i]).sum();
            let t = x[j] - grad / lip;
            let threshold = l1 / lip;
            x_next[j] = if t > threshold {
                t - threshold
            } else if t < -threshold {
                t + threshold
            } else {
                0.0
            };
            delta += (x_next[j] - x[j]) * (x_next[j] - x[j]);
            norm += x_next[j] * x_next[j];
        }
        x = x_next;
        if delta.sqrt() <= 1e-13 * norm.sqrt().max(1e-30) {
            break;
        }
    }
    x
}

pub fn lasso_objective(a: &[Vec<f64>], y: &[f64], l1: f64, x: &[f64]) -> f64 {
    let mut fit = 0.0;
    for i in 0..a.len() {
        let r = a[i].iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>() - y[i];
        fit += r * r;
    }
    0.5 * fit + l1 * x.iter().map(|v| v.abs()).sum::<f64>()
}

// --- conversions and random data helpers ---

pub fn to_nested(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn from_nested(rows: &[Vec<f64>]) -> DenseMatrix {
    let (r, c) = (rows.len(), rows[0].len());
    let mut data = vec![0.0; r * c];
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            data[i + j * r] = v;
        }
    }
    DenseMatrix::from_vec(r, c, data).unwrap()
}

pub fn uniform_vec(rng: &mut ChaCha20Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|_| lo + (hi - lo) * rng.random::<f64>())
        .collect()
}

pub fn uniform_nested(
    rng: &mut ChaCha20Rng,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Vec<Vec<f64>> {
    (0..rows).map(|_| uniform_vec(rng, cols, lo, hi)).collect()
}
