//! Python bindings. Matrices cross the boundary as lists of rows,
//! permutations as lists of column indices.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use birkhoff_core::bench::{self, CampaignOptions};
use birkhoff_core::matching as engines;
use birkhoff_core::{bvn, lcu, matrix, sinkhorn, Matrix, SupportGraph, ToleranceConfig, Variant};

create_exception!(birkhoff, BirkhoffError, PyException);

fn err(e: birkhoff_core::Error) -> PyErr {
    BirkhoffError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(err)
}

fn parse_variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(err)
}

#[pyclass(name = "Decomposition", frozen, module = "birkhoff")]
pub struct PyDecomposition {
    inner: bvn::Decomposition,
}

#[pymethods]
impl PyDecomposition {
    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant.name()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights()
    }

    #[getter]
    fn raw_weights(&self) -> Vec<f64> {
        self.inner.raw_weights.clone()
    }

    #[getter]
    fn permutations(&self) -> Vec<Vec<usize>> {
        self.inner
            .permutations()
            .map(|p| p.map().to_vec())
            .collect()
    }

    #[getter]
    fn residual_l1(&self) -> f64 {
        self.inner.residual_l1
    }

    #[getter]
    fn norm(&self) -> &'static str {
        match self.inner.norm {
            bvn::ResidualNorm::Induced => "induced",
            bvn::ResidualNorm::Entrywise => "entrywise",
        }
    }

    #[getter]
    fn theta(&self) -> Option<f64> {
        self.inner.theta
    }

    /// Common residual sum before each extraction step.
    #[getter]
    fn step_common_sums(&self) -> Vec<f64> {
        self.inner.steps.iter().map(|s| s.common_sum).collect()
    }

    fn reconstruct(&self) -> Vec<Vec<f64>> {
        bvn::reconstruct(&self.inner)
            .map(|m| m.to_rows())
            .unwrap_or_default()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Decomposition(variant={:?}, K={}, residual_l1={:e})",
            self.inner.variant.name(),
            self.inner.len(),
            self.inner.residual_l1
        )
    }
}

#[pyclass(name = "ScalingResult", frozen, get_all, module = "birkhoff")]
pub struct PyScalingResult {
    d1: Vec<f64>,
    d2: Vec<f64>,
    s: Vec<Vec<f64>>,
    iterations: usize,
    achieved_tol: f64,
}

#[pyclass(name = "ResourceReport", frozen, get_all, module = "birkhoff")]
pub struct PyResourceReport {
    k: usize,
    ancilla_qubits: u32,
    system_qubits: Option<u32>,
    alpha: f64,
    p_succ_uniform: f64,
    second_singular_value: Option<f64>,
}

#[pyclass(name = "PauliCount", frozen, get_all, module = "birkhoff")]
pub struct PyPauliCount {
    n_qubits: u32,
    nonzero_terms: usize,
    coefficient_l1: f64,
}

#[pyfunction]
#[pyo3(signature = (m, tol = 1e-9))]
fn is_doubly_stochastic(m: Vec<Vec<f64>>, tol: f64) -> PyResult<bool> {
    Ok(matrix::is_doubly_stochastic(&to_matrix(m)?, tol))
}

#[pyfunction]
#[pyo3(signature = (n, seed, tol = 1e-10))]
fn random_doubly_stochastic(n: usize, seed: u64, tol: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(matrix::random_doubly_stochastic(n, seed, tol)
        .map_err(err)?
        .to_rows())
}

#[pyfunction]
#[pyo3(signature = (a, tol = sinkhorn::DEFAULT_TOL, max_iter = sinkhorn::DEFAULT_MAX_ITER))]
fn sinkhorn_scale(a: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<PyScalingResult> {
    let r = sinkhorn::sinkhorn_scale(&to_matrix(a)?, tol, max_iter).map_err(err)?;
    Ok(PyScalingResult {
        s: r.s.to_rows(),
        d1: r.d1,
        d2: r.d2,
        iterations: r.iterations,
        achieved_tol: r.achieved_tol,
    })
}

/// `diag(1/d1) s diag(1/d2)`.
#[pyfunction]
fn reconstruct_original(d1: Vec<f64>, d2: Vec<f64>, s: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let s = to_matrix(s)?;
    let r = sinkhorn::ScalingResult {
        achieved_tol: s.max_sum_deviation(1.0),
        d1,
        d2,
        s,
        iterations: 0,
        deviation_history: Vec::new(),
    };
    Ok(sinkhorn::reconstruct_original(&r).map_err(err)?.to_rows())
}

/// Returns `(M, scale)`.
#[pyfunction]
fn complete_to_doubly_stochastic(a: Vec<Vec<f64>>) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let c = sinkhorn::complete_to_doubly_stochastic(&to_matrix(a)?).map_err(err)?;
    Ok((c.m.to_rows(), c.scale))
}

/// `kind` is one of `any`, `max_weight`, `bottleneck`. Returns
/// `(permutation, min_edge, total_weight)` or `None`.
#[pyfunction]
#[pyo3(signature = (weights, kind = "any", threshold = 1e-12))]
fn matching(
    weights: Vec<Vec<f64>>,
    kind: &str,
    threshold: f64,
) -> PyResult<Option<(Vec<usize>, f64, f64)>> {
    let g = SupportGraph::new(&to_matrix(weights)?, threshold);
    let result = match kind {
        "any" => engines::perfect_matching(&g),
        "max_weight" => engines::max_weight_perfect_matching(&g),
        "bottleneck" => engines::bottleneck_perfect_matching(&g),
        other => {
            return Err(BirkhoffError::new_err(format!(
                "unknown matching kind {other:?}"
            )))
        }
    };
    Ok(result.map(|m| (m.perm.map().to_vec(), m.min_edge, m.total_weight)))
}

/// `variant` is one of `original`, `largest`, `bottleneck`, `threshold`, `cutoff`;
/// `norm` is `induced` or `entrywise`.
#[pyfunction]
#[pyo3(signature = (s, variant = "largest", eps = 0.01, theta = None, norm = "induced"))]
fn decompose(
    s: Vec<Vec<f64>>,
    variant: &str,
    eps: f64,
    theta: Option<f64>,
    norm: &str,
) -> PyResult<PyDecomposition> {
    let s = to_matrix(s)?;
    let opts = bvn::DecomposeOptions {
        norm: norm.parse().map_err(err)?,
        ..Default::default()
    };
    let d =
        bvn::decompose_configured(&s, eps, parse_variant(variant)?, theta, &opts).map_err(err)?;
    Ok(PyDecomposition { inner: d })
}

#[pyfunction]
fn find_threshold(s: Vec<Vec<f64>>, eps: f64) -> PyResult<f64> {
    bvn::find_threshold(&to_matrix(s)?, eps).map_err(err)
}

#[pyfunction]
fn cutoff_prune(d: &PyDecomposition, s: Vec<Vec<f64>>, tol: f64) -> PyResult<PyDecomposition> {
    let pruned = bvn::cutoff_prune(&d.inner, &to_matrix(s)?, tol).map_err(err)?;
    Ok(PyDecomposition { inner: pruned })
}

#[pyfunction]
#[pyo3(signature = (d, s, svd = false))]
fn resource_report(d: &PyDecomposition, s: Vec<Vec<f64>>, svd: bool) -> PyResult<PyResourceReport> {
    let s = to_matrix(s)?;
    let mut r = lcu::resource_report(&d.inner, &s).map_err(err)?;
    if svd {
        r = r.with_second_singular_value(&s);
    }
    Ok(PyResourceReport {
        k: r.k,
        ancilla_qubits: r.ancilla_qubits,
        system_qubits: r.system_qubits,
        alpha: r.alpha,
        p_succ_uniform: r.p_succ_uniform,
        second_singular_value: r.second_singular_value,
    })
}

#[pyfunction]
fn success_probability(s: Vec<Vec<f64>>, psi: Vec<f64>) -> PyResult<f64> {
    lcu::success_probability(&to_matrix(s)?, &psi).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, tol = lcu::DEFAULT_PAULI_TOL))]
fn pauli_term_count(a: Vec<Vec<f64>>, tol: f64) -> PyResult<PyPauliCount> {
    let c = lcu::pauli_term_count(&to_matrix(a)?, tol).map_err(err)?;
    Ok(PyPauliCount {
        n_qubits: c.n_qubits,
        nonzero_terms: c.nonzero_terms,
        coefficient_l1: c.coefficient_l1,
    })
}

/// `(n, variant, trial_seed, k, residual_l1, error)`
type ScalingRow = (usize, &'static str, u64, usize, f64, Option<String>);

/// Rows as `(n, variant, trial_seed, k, residual_l1, error)` tuples.
#[pyfunction]
#[pyo3(signature = (sizes, variants, eps = 0.01, trials = 5, seed = 0))]
fn run_scaling_experiment(
    py: Python<'_>,
    sizes: Vec<usize>,
    variants: Vec<String>,
    eps: f64,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<ScalingRow>> {
    let variants = variants
        .iter()
        .map(|v| parse_variant(v))
        .collect::<PyResult<Vec<_>>>()?;
    let opts = CampaignOptions { timing: false };
    let rows = py
        .detach(|| bench::run_scaling_experiment(&sizes, &variants, eps, trials, seed, opts))
        .map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            (
                r.n,
                r.variant.name(),
                r.trial_seed,
                r.k,
                r.residual_l1,
                r.error,
            )
        })
        .collect())
}

/// `(n, eps, mean_k, std_k, trials, failed)`
type PrecisionRow = (usize, f64, f64, f64, usize, usize);

/// Rows as `(n, eps, mean_k, std_k, trials, failed)` tuples.
#[pyfunction]
#[pyo3(signature = (n, eps_list, trials = 5, seed = 0))]
fn run_precision_experiment(
    py: Python<'_>,
    n: usize,
    eps_list: Vec<f64>,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<PrecisionRow>> {
    let rows = py
        .detach(|| bench::run_precision_experiment(n, &eps_list, trials, seed))
        .map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.n, r.eps, r.mean_k, r.std_k, r.trials, r.failed))
        .collect())
}

#[pymodule]
fn birkhoff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BirkhoffError", m.py().get_type::<BirkhoffError>())?;
    m.add(
        "DEFAULT_ZERO_THRESHOLD",
        ToleranceConfig::default().zero_threshold,
    )?;
    m.add_class::<PyDecomposition>()?;
    m.add_class::<PyScalingResult>()?;
    m.add_class::<PyResourceReport>()?;
    m.add_class::<PyPauliCount>()?;
    m.add_function(wrap_pyfunction!(is_doubly_stochastic, m)?)?;
    m.add_function(wrap_pyfunction!(random_doubly_stochastic, m)?)?;
    m.add_function(wrap_pyfunction!(sinkhorn_scale, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_original, m)?)?;
    m.add_function(wrap_pyfunction!(complete_to_doubly_stochastic, m)?)?;
    m.add_function(wrap_pyfunction!(matching, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(find_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(cutoff_prune, m)?)?;
    m.add_function(wrap_pyfunction!(resource_report, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_term_count, m)?)?;
    m.add_function(wrap_pyfunction!(run_scaling_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_precision_experiment, m)?)?;
    Ok(())
}
