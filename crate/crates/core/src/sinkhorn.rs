//! Turning non-negative matrices into doubly stochastic ones, either by
//! diagonal scaling `S = D1 A D2` or by embedding into a `2N x 2N` matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ToleranceConfig};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingResult {
    /// Diagonal of the row scaler `D1`.
    pub d1: Vec<f64>,
    /// Diagonal of the column scaler `D2`.
    pub d2: Vec<f64>,
    pub s: Matrix,
    /// Number of full row+column sweeps performed.
    pub iterations: usize,
    /// Max deviation of any row or column sum of `s` from 1.
    pub achieved_tol: f64,
    /// Deviation measured after each sweep.
    #[serde(skip)]
    pub deviation_history: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletionResult {
    pub m: Matrix,
    /// Factor the input was divided by before embedding.
    pub scale: f64,
    pub original_dim: usize,
}

impl CompletionResult {
    /// Top-left `N x N` block of the embedding, `A / scale`.
    pub fn principal_block(&self) -> Matrix {
        let n = self.original_dim;
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.m.get(i, j))
            .collect();
        Matrix::new(n, data).expect("principal block of a valid matrix")
    }

    /// Diagonal of the off-diagonal blocks.
    pub fn slack(&self) -> Vec<f64> {
        let n = self.original_dim;
        (0..n).map(|i| self.m.get(i, n + i)).collect()
    }
}

fn scaled(a: &Matrix, d1: &[f64], d2: &[f64]) -> Matrix {
    let n = a.dim();
    let data = a
        .rows()
        .zip(d1)
        .flat_map(|(row, &r)| row.iter().zip(d2).map(move |(&v, &c)| r * v * c))
        .collect();
    Matrix::new(n, data).expect("scaling preserves shape and finiteness")
}

fn check_scalable(a: &Matrix, zero_threshold: f64) -> Result<()> {
    let n = a.dim();
    if let Some(pos) = a.as_slice().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "negative entry at ({}, {})",
            pos / n,
            pos % n
        )));
    }
    for i in 0..n {
        if a.row(i).iter().all(|&v| v <= zero_threshold) {
            return Err(Error::InvalidInput(format!(
                "row {i} has no positive entry"
            )));
        }
        if (0..n).all(|k| a.get(k, i) <= zero_threshold) {
            return Err(Error::InvalidInput(format!(
                "column {i} has no positive entry"
            )));
        }
    }
    Ok(())
}

/// Alternating row/column normalization until every row and column sum of
/// `diag(d1) * a * diag(d2)` is within `tol` of 1.
pub fn sinkhorn_scale(a: &Matrix, tol: f64, max_iter: usize) -> Result<ScalingResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    check_scalable(a, ToleranceConfig::default().zero_threshold)?;
    let n = a.dim();
    let mut d1 = vec![1.0; n];
    let mut d2 = vec![1.0; n];
    let mut s = a.clone();
    let mut deviation = s.max_sum_deviation(1.0);
    let mut history = Vec::new();
    let mut iterations = 0;

    while deviation > tol {
        if iterations == max_iter {
            return Err(Error::NonConvergence {
                iterations,
                deviation,
            });
        }
        for (i, row) in a.rows().enumerate() {
            let sum: f64 = row.iter().zip(&d2).map(|(v, c)| v * c).sum();
            d1[i] = 1.0 / sum;
        }
        let mut col = vec![0.0; n];
        for (row, &r) in a.rows().zip(&d1) {
            for (c, v) in col.iter_mut().zip(row) {
                *c += r * v;
            }
        }
        for (d, c) in d2.iter_mut().zip(col) {
            *d = 1.0 / c;
        }
        iterations += 1;
        s = scaled(a, &d1, &d2);
        deviation = s.max_sum_deviation(1.0);
        history.push(deviation);
    }

    Ok(ScalingResult {
        d1,
        d2,
        s,
        iterations,
        achieved_tol: deviation,
        deviation_history: history,
    })
}

/// Undoes the scaling: `diag(1/d1) * s * diag(1/d2)`.
pub fn reconstruct_original(r: &ScalingResult) -> Result<Matrix> {
    if let Some(i) = r.d1.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DivisionByZero(i));
    }
    if let Some(j) = r.d2.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DivisionByZero(r.d1.len() + j));
    }
    let inv1: Vec<f64> = r.d1.iter().map(|d| 1.0 / d).collect();
    let inv2: Vec<f64> = r.d2.iter().map(|d| 1.0 / d).collect();
    Ok(scaled(&r.s, &inv1, &inv2))
}

/// Embeds `a` (with matching row and column sums per index) into the doubly
/// stochastic block matrix `[[a/c, diag(r)], [diag(r), a/c]]` where
/// `c = max(1, max row sum)` and `r_i = 1 - rowsum_i(a/c)`.
pub fn complete_to_doubly_stochastic(a: &Matrix) -> Result<CompletionResult> {
    let tol = ToleranceConfig::default();
    let n = a.dim();
    if let Some(pos) = a.as_slice().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "negative entry at ({}, {})",
            pos / n,
            pos % n
        )));
    }
    let rows = a.row_sums();
    let cols = a.col_sums();
    for (index, (&row_sum, &col_sum)) in rows.iter().zip(&cols).enumerate() {
        if (row_sum - col_sum).abs() > tol.ds_tolerance {
            return Err(Error::UnsupportedShape {
                index,
                row_sum,
                col_sum,
            });
        }
    }
    let scale = rows.iter().copied().fold(1.0, f64::max);
    let block = a.map(|v| v / scale);
    let slack: Vec<f64> = block
        .row_sums()
        .iter()
        .map(|s| (1.0 - s).max(0.0))
        .collect();

    let mut m = Matrix::zeros(2 * n);
    for (i, &r) in slack.iter().enumerate() {
        for j in 0..n {
            let v = block.get(i, j);
            m.set(i, j, v);
            m.set(n + i, n + j, v);
        }
        m.set(i, n + i, r);
        m.set(n + i, i, r);
    }
    Ok(CompletionResult {
        m,
        scale,
        original_dim: n,
    })
}
