//! Brute-force references shared by the integration tests. Nothing here
//! calls into the matching or transform code under test.

#![allow(dead_code)]

use birkhoff_core::Matrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                extend(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Permutations whose every entry exceeds `threshold`.
pub fn supported_permutations(m: &Matrix, threshold: f64) -> Vec<Vec<usize>> {
    all_permutations(m.dim())
        .into_iter()
        .filter(|p| p.iter().enumerate().all(|(i, &j)| m.get(i, j) > threshold))
        .collect()
}

/// Row-order sum, the same accumulation order the engines report.
pub fn diagonal_sum(m: &Matrix, p: &[usize]) -> f64 {
    p.iter()
        .enumerate()
        .fold(0.0, |acc, (i, &j)| acc + m.get(i, j))
}

pub fn diagonal_min(m: &Matrix, p: &[usize]) -> f64 {
    p.iter()
        .enumerate()
        .map(|(i, &j)| m.get(i, j))
        .fold(f64::INFINITY, f64::min)
}

pub fn brute_max_weight(m: &Matrix, threshold: f64) -> Option<f64> {
    supported_permutations(m, threshold)
        .iter()
        .map(|p| diagonal_sum(m, p))
        .reduce(f64::max)
}

pub fn brute_bottleneck(m: &Matrix, threshold: f64) -> Option<f64> {
    supported_permutations(m, threshold)
        .iter()
        .map(|p| diagonal_min(m, p))
        .reduce(f64::max)
}

/// Uniform(0, 1] entries with roughly `zero_fraction` of them set to zero.
pub fn random_sparse(n: usize, zero_fraction: f64, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n)
        .map(|_| {
            let keep = rng.random::<f64>() >= zero_fraction;
            let v = 1.0 - rng.random::<f64>();
            if keep {
                v
            } else {
                0.0
            }
        })
        .collect();
    Matrix::new(n, data).unwrap()
}

/// Plain alternating normalization with no early exit beyond `tol`.
pub fn reference_sinkhorn(a: &Matrix, tol: f64, max_iter: usize) -> Option<Matrix> {
    let n = a.dim();
    let mut rows = a.to_rows();
    for _ in 0..max_iter {
        for row in rows.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        for j in 0..n {
            let s: f64 = rows.iter().map(|r| r[j]).sum();
            rows.iter_mut().for_each(|r| r[j] /= s);
        }
        let m = Matrix::from_rows(&rows).unwrap();
        if m.max_sum_deviation(1.0) <= tol {
            return Some(m);
        }
    }
    None
}

fn single_qubit(label: usize) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    match label {
        0 => [[l, o], [o, l]],
        1 => [[o, l], [l, o]],
        2 => [[o, -i], [i, o]],
        3 => [[l, o], [o, -l]],
        _ => unreachable!(),
    }
}

/// Dense Pauli string for a base-4 index, leftmost factor on the most
/// significant qubit.
pub fn pauli_string(index: usize, n_qubits: u32) -> Vec<Vec<Complex64>> {
    let mut out = vec![vec![Complex64::new(1.0, 0.0)]];
    for q in (0..n_qubits).rev() {
        let f = single_qubit((index >> (2 * q)) & 3);
        let m = out.len();
        let mut next = vec![vec![Complex64::new(0.0, 0.0); 2 * m]; 2 * m];
        for (r, row) in out.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        next[r * 2 + a][c * 2 + b] = v * f[a][b];
                    }
                }
            }
        }
        out = next;
    }
    out
}

/// `tr(P^dagger A) / N` for every string, by explicit Kronecker products.
pub fn kron_pauli_coefficients(a: &Matrix) -> Vec<Complex64> {
    let n = a.dim();
    let q = n.trailing_zeros();
    (0..n * n)
        .map(|idx| {
            let p = pauli_string(idx, q);
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, row) in p.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    acc += v.conj() * a.get(r, c);
                }
            }
            acc / n as f64
        })
        .collect()
}

/// Smallest `q` with `2^q >= k`, by counting.
pub fn ceil_log2(k: usize) -> u32 {
    let mut q = 0;
    while (1usize << q) < k {
        q += 1;
    }
    q
}
