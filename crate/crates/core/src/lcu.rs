//! Cost of block-encoding a decomposition with a linear combination of
//! unitaries, plus the Pauli-basis baseline.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bvn::Decomposition;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    /// Number of terms `K`.
    pub k: usize,
    /// `ceil(log2 K)` qubits to index the terms.
    pub ancilla_qubits: u32,
    /// `log2 N`, present only when `N` is a power of two.
    pub system_qubits: Option<u32>,
    /// Sum of the absolute term coefficients.
    pub alpha: f64,
    /// `||S u||^2` for the uniform unit vector `u`.
    pub p_succ_uniform: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub second_singular_value: Option<f64>,
}

impl ResourceReport {
    /// Fills in the second largest singular value of `s` (dense SVD).
    pub fn with_second_singular_value(mut self, s: &Matrix) -> Self {
        self.second_singular_value = second_singular_value(s);
        self
    }
}

/// `ceil(log2 k)` for `k >= 1`.
pub fn ancilla_qubits(k: usize) -> u32 {
    assert!(k > 0, "term count must be positive");
    k.next_power_of_two().trailing_zeros()
}

fn log2_exact(n: usize) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

pub fn resource_report(d: &Decomposition, s: &Matrix) -> Result<ResourceReport> {
    let n = d
        .dim()
        .ok_or_else(|| Error::InvalidInput("empty decomposition".into()))?;
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.dim(),
        });
    }
    let u = vec![1.0 / (n as f64).sqrt(); n];
    Ok(ResourceReport {
        k: d.len(),
        ancilla_qubits: ancilla_qubits(d.len()),
        system_qubits: log2_exact(n),
        alpha: d.terms.iter().map(|t| t.weight.abs()).sum(),
        p_succ_uniform: success_probability(s, &u)?,
        second_singular_value: None,
    })
}

/// Post-selection success probability `||S psi||^2` for a unit vector `psi`.
pub fn success_probability(s: &Matrix, psi: &[f64]) -> Result<f64> {
    s.check_dim(psi.len())?;
    let norm = psi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let out = s.mul_vec(psi)?;
    Ok(out.iter().map(|v| v * v).sum())
}

pub fn singular_values(s: &Matrix) -> Vec<f64> {
    let n = s.dim();
    let m = DMatrix::from_row_slice(n, n, s.as_slice());
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn second_singular_value(s: &Matrix) -> Option<f64> {
    singular_values(s).get(1).copied()
}

pub const DEFAULT_PAULI_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCount {
    pub n_qubits: u32,
    /// Strings with `|c_P| > tol`.
    pub nonzero_terms: usize,
    /// `sum_P |c_P|`, the LCU normalization of the Pauli expansion.
    pub coefficient_l1: f64,
}

const PAULI_LABELS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Label of the Pauli string at `index` in the coefficient vector returned by
/// [`pauli_coefficients`]; the first character acts on the most significant
/// qubit.
pub fn pauli_label(index: usize, n_qubits: u32) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| PAULI_LABELS[(index >> (2 * q)) & 3])
        .collect()
}

/// Coefficients `c_P = tr(P^dagger A) / N` of all `4^n` Pauli strings, indexed
/// in base 4 with digits `I=0, X=1, Y=2, Z=3` (most significant qubit first).
///
/// Recursive block transform: with `A = [[A00, A01], [A10, A11]]` the leading
/// qubit contributes `I: (A00+A11)/2`, `X: (A01+A10)/2`, `Y: i(A01-A10)/2`,
/// `Z: (A00-A11)/2`, each expanded again on the remaining qubits.
/// O(N^2 log N) arithmetic.
pub fn pauli_coefficients(a: &Matrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    log2_exact(n).ok_or(Error::NotPowerOfTwo(n))?;
    let block: Vec<Complex64> = a
        .as_slice()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    Ok(forward(&block, n))
}

fn quadrant(block: &[Complex64], m: usize, row: usize, col: usize) -> Vec<Complex64> {
    let h = m / 2;
    (0..h)
        .flat_map(|i| {
            let start = (row * h + i) * m + col * h;
            block[start..start + h].iter().copied()
        })
        .collect()
}

fn forward(block: &[Complex64], m: usize) -> Vec<Complex64> {
    if m == 1 {
        return block.to_vec();
    }
    let a00 = quadrant(block, m, 0, 0);
    let a01 = quadrant(block, m, 0, 1);
    let a10 = quadrant(block, m, 1, 0);
    let a11 = quadrant(block, m, 1, 1);
    let i = Complex64::i();
    let half = 0.5;
    let combine = |f: &dyn Fn(usize) -> Complex64| (0..a00.len()).map(f).collect::<Vec<_>>();
    let parts = [
        combine(&|k| (a00[k] + a11[k]) * half),
        combine(&|k| (a01[k] + a10[k]) * half),
        combine(&|k| i * (a01[k] - a10[k]) * half),
        combine(&|k| (a00[k] - a11[k]) * half),
    ];
    parts.iter().flat_map(|p| forward(p, m / 2)).collect()
}

fn inverse(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    if m == 1 {
        return coeffs.to_vec();
    }
    let h = m / 2;
    let quarter = coeffs.len() / 4;
    let b: Vec<Vec<Complex64>> = coeffs
        .chunks_exact(quarter)
        .map(|c| inverse(c, h))
        .collect();
    let (bi, bx, by, bz) = (&b[0], &b[1], &b[2], &b[3]);
    let i = Complex64::i();
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for r in 0..h {
        for c in 0..h {
            let k = r * h + c;
            out[r * m + c] = bi[k] + bz[k];
            out[r * m + h + c] = bx[k] - i * by[k];
            out[(h + r) * m + c] = bx[k] + i * by[k];
            out[(h + r) * m + h + c] = bi[k] - bz[k];
        }
    }
    out
}

/// `sum_P c_P P` as a dense complex matrix (row-major), the inverse of
/// [`pauli_coefficients`].
pub fn pauli_reconstruct(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = (coeffs.len() as f64).sqrt().round() as usize;
    if n * n != coeffs.len() || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(inverse(coeffs, n))
}

pub fn pauli_term_count(a: &Matrix, tol: f64) -> Result<PauliCount> {
    let coeffs = pauli_coefficients(a)?;
    let n_qubits = a.dim().trailing_zeros();
    Ok(PauliCount {
        n_qubits,
        nonzero_terms: coeffs.iter().filter(|c| c.norm() > tol).count(),
        coefficient_l1: coeffs.iter().map(|c| c.norm()).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvn;
    use crate::matrix::Permutation;

    #[test]
    fn ancilla_counts() {
        let got: Vec<u32> = [1, 2, 3, 4, 5, 8, 9, 16, 17]
            .iter()
            .map(|&k| ancilla_qubits(k))
            .collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 4, 5]);
    }

    #[test]
    fn identity_report() {
        let s = Matrix::identity(4);
        let d = bvn::decompose_largest_weight(&s, 1e-6).unwrap();
        let r = resource_report(&d, &s).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.ancilla_qubits, 0);
        assert_eq!(r.system_qubits, Some(2));
        assert_eq!(r.alpha, 1.0);
        assert!((r.p_succ_uniform - 1.0).abs() < 1e-15);

        let r = r.with_second_singular_value(&s);
        assert!((r.second_singular_value.unwrap() - 1.0).abs() < 1e-12);

        assert!(matches!(
            resource_report(&d, &Matrix::identity(3)),
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn non_power_of_two_has_no_system_qubits() {
        let s = Matrix::uniform(3);
        let d = bvn::decompose_largest_weight(&s, 1e-9).unwrap();
        let r = resource_report(&d, &s).unwrap();
        assert_eq!(r.system_qubits, None);
        assert_eq!(r.k, 3);
        assert_eq!(r.ancilla_qubits, 2);
    }

    #[test]
    fn success_probability_examples() {
        let psi = [0.6, 0.0, 0.8, 0.0];
        assert!((success_probability(&Matrix::identity(4), &psi).unwrap() - 1.0).abs() < 1e-15);
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(
            success_probability(&Matrix::uniform(2), &[h, -h]).unwrap(),
            0.0
        );
        assert!((success_probability(&Matrix::uniform(2), &[h, h]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            success_probability(&Matrix::identity(2), &[1.0, 1.0]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn pauli_small_cases() {
        let c = pauli_term_count(&Matrix::identity(2), DEFAULT_PAULI_TOL).unwrap();
        assert_eq!((c.n_qubits, c.nonzero_terms, c.coefficient_l1), (1, 1, 1.0));
        let coeffs = pauli_coefficients(&Matrix::identity(2)).unwrap();
        assert_eq!(coeffs[0], Complex64::new(1.0, 0.0));

        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let coeffs = pauli_coefficients(&x).unwrap();
        assert_eq!(
            pauli_term_count(&x, DEFAULT_PAULI_TOL)
                .unwrap()
                .nonzero_terms,
            1
        );
        assert_eq!(coeffs[1], Complex64::new(1.0, 0.0));
        assert_eq!(pauli_label(1, 1), "X");

        assert!(matches!(
            pauli_term_count(&Matrix::identity(3), 1e-12),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn bit_reversal_is_single_string() {
        // flipping every bit of the index is X on every qubit
        for q in 1..=4u32 {
            let n = 1usize << q;
            let p = Permutation::new((0..n).map(|i| n - 1 - i).collect()).unwrap();
            let coeffs = pauli_coefficients(&p.to_matrix()).unwrap();
            let nonzero: Vec<usize> = (0..coeffs.len())
                .filter(|&k| coeffs[k].norm() > 1e-12)
                .collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(pauli_label(nonzero[0], q), "X".repeat(q as usize));
        }
    }

    #[test]
    fn labels_are_most_significant_first() {
        assert_eq!(pauli_label(0b01_10, 2), "XY");
        assert_eq!(pauli_label(0b11_00_01, 3), "ZIX");
    }
}
