//! Dense square matrices, permutations and the doubly-stochastic predicates
//! shared by every other module.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sinkhorn;

/// Dense `n x n` real matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Fails on non-square input or
    /// non-finite entries.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Every entry equal to `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            n,
            data: vec![1.0 / n as f64; n * n],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for row in self.rows() {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    /// Largest `|sum - target|` over all row and column sums.
    pub fn max_sum_deviation(&self, target: f64) -> f64 {
        self.row_sums()
            .into_iter()
            .chain(self.col_sums())
            .map(|s| (s - target).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Induced matrix 1-norm: largest absolute column sum.
    pub fn induced_l1_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for row in self.rows() {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &Matrix) -> Result<Self> {
        self.check_dim(other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Adds `weight` to every entry `(i, perm(i))`.
    pub(crate) fn add_permutation(&mut self, perm: &Permutation, weight: f64) {
        for (i, &j) in perm.map().iter().enumerate() {
            self.data[i * self.n + j] += weight;
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(v.len())?;
        Ok(self
            .rows()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Matrix {
    /// Text exchange format: the dimension on the first line, then one
    /// whitespace-separated row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension line {header:?}")))?;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {n} rows, found {i}")))?;
            let before = data.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {i}: bad number {tok:?}")))?;
                data.push(v);
            }
            if data.len() - before != n {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {n}",
                    data.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse(format!("trailing data after {n} rows")));
        }
        Matrix::new(n, data)
    }
}

/// A bijection on `0..n`; `map[i] = j` selects matrix entry `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &j in &map {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidInput(format!(
                    "{map:?} is not a bijection on 0..{n}"
                )));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Cyclic shift `i -> (i + k) mod n`.
    pub fn shift(n: usize, k: usize) -> Self {
        Self((0..n).map(|i| (i + k) % n).collect())
    }

    pub(crate) fn from_vec_unchecked(map: Vec<usize>) -> Self {
        debug_assert!(Self::new(map.clone()).is_ok());
        Self(map)
    }

    pub fn map(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn to_matrix(&self) -> Matrix {
        permutation_to_matrix(self)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// Floating-point interpretation of "positive entry" and "doubly stochastic".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Entries at or below this value are structural zeros.
    pub zero_threshold: f64,
    /// Allowed deviation of row and column sums from 1.
    pub ds_tolerance: f64,
}

impl ToleranceConfig {
    pub fn new(zero_threshold: f64, ds_tolerance: f64) -> Result<Self> {
        if !(zero_threshold > 0.0 && ds_tolerance > 0.0 && zero_threshold < ds_tolerance) {
            return Err(Error::InvalidInput(format!(
                "need 0 < zero_threshold ({zero_threshold:e}) < ds_tolerance ({ds_tolerance:e})"
            )));
        }
        Ok(Self {
            zero_threshold,
            ds_tolerance,
        })
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            zero_threshold: 1e-12,
            ds_tolerance: 1e-9,
        }
    }
}

pub fn is_doubly_stochastic(m: &Matrix, tol: f64) -> bool {
    m.min_entry() >= -tol && m.max_sum_deviation(1.0) <= tol
}

pub fn permutation_to_matrix(p: &Permutation) -> Matrix {
    let mut m = Matrix::zeros(p.len());
    m.add_permutation(p, 1.0);
    m
}

/// Entrywise l1 norm (sum of absolute values).
pub fn l1_norm(m: &Matrix) -> f64 {
    m.l1_norm()
}

pub fn frobenius_norm(m: &Matrix) -> f64 {
    m.frobenius_norm()
}

/// Largest absolute column sum. For a residual with common row/column sum
/// `r` this is exactly `r`.
pub fn induced_l1_norm(m: &Matrix) -> f64 {
    m.induced_l1_norm()
}

/// Default sweep budget used when generating random instances.
pub const RANDOM_SINKHORN_MAX_ITER: usize = 10_000;

/// Matrix with i.i.d. uniform(0, 1] entries.
pub fn random_positive(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n).map(|_| 1.0 - rng.random::<f64>()).collect();
    Matrix { n, data }
}

/// Seeded dense doubly stochastic matrix: uniform entries balanced by
/// Sinkhorn scaling down to `tol`.
pub fn random_doubly_stochastic(n: usize, seed: u64, tol: f64) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "dimension must be >= 2, got {n}"
        )));
    }
    let a = random_positive(n, seed);
    Ok(sinkhorn::sinkhorn_scale(&a, tol, RANDOM_SINKHORN_MAX_ITER)?.s)
}
