//! Independent reference implementations backing the acceptance suite.
//!
//! Same ground rules as the library's oracle module: plain nested-`Vec`
//! containers, explicit loops, exhaustive enumeration where feasible, and no
//! shared code with the implementation under test.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use oscar2d::DenseMatrix;

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
/// minimizer; every candidate is scored with the literal pairwise objective
/// and the best kept.
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
        let r: f64 = a[i].iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>() - y[i];
        fit += r * r;
    }
    0.5 * fit + l1 * x.iter().map(|v| v.abs()).sum::<f64>()
}

pub fn from_nested(rows: &[Vec<f64>]) -> DenseMatrix {
    let r = rows.len();
    let c = rows[0].len();
    let mut m = DenseMatrix::zeros(r, c);
    for j in 0..c {
        let col = m.col_mut(j);
        for (i, row) in rows.iter().enumerate() {
            col[i] = row[j];
        }
    }
    m
}

pub fn uniform_vec(rng: &mut ChaCha20Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
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
