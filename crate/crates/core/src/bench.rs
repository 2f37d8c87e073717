//! Seeded term-count campaigns over random doubly stochastic matrices.
//!
//! Trial `t` at size `n` always uses seed `base_seed + 1000 n + t`, so every
//! variant (and the precision sweep) sees the same matrices for the same
//! base seed. Trials run in parallel; output order is (size, variant, trial).

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bvn::{self, Variant};
use crate::error::{Error, Result};
use crate::matrix::{random_doubly_stochastic, Matrix};

/// Sinkhorn tolerance of generated instances.
pub const INSTANCE_TOL: f64 = 1e-10;

pub fn trial_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    base_seed
        .wrapping_add(n as u64 * 1000)
        .wrapping_add(trial as u64)
}

pub fn instance(base_seed: u64, n: usize, trial: usize) -> Result<Matrix> {
    random_doubly_stochastic(n, trial_seed(base_seed, n, trial), INSTANCE_TOL)
}

/// Columns shared by every CSV row type, in output order.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingExperimentRow {
    pub n: usize,
    pub variant: Variant,
    pub trial_seed: u64,
    /// Term count; 0 when the trial failed.
    pub k: usize,
    pub runtime_ms: f64,
    pub residual_l1: f64,
    pub eps: f64,
    /// Error message of a failed trial, empty otherwise.
    pub error: Option<String>,
}

impl CsvRow for ScalingExperimentRow {
    const HEADER: &'static [&'static str] = &[
        "n",
        "variant",
        "trial_seed",
        "k",
        "runtime_ms",
        "residual_l1",
        "eps",
        "error",
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionExperimentRow {
    pub n: usize,
    pub eps: f64,
    pub mean_k: f64,
    pub std_k: f64,
    /// Successful trials behind the statistics.
    pub trials: usize,
    pub failed: usize,
}

impl CsvRow for PrecisionExperimentRow {
    const HEADER: &'static [&'static str] = &["n", "eps", "mean_k", "std_k", "trials", "failed"];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub n: usize,
    pub variant: Variant,
    pub trials: usize,
    pub failed: usize,
    pub mean_k: f64,
    pub std_k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CampaignOptions {
    /// Record wall-clock runtimes; when off `runtime_ms` is 0 so output is
    /// byte-reproducible.
    pub timing: bool,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        Self { timing: true }
    }
}

/// Mean and sample standard deviation; `(NaN, NaN)` for no samples.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    match sizes.iter().find(|&&n| n < 4 || !n.is_power_of_two()) {
        Some(n) => Err(Error::InvalidInput(format!(
            "sizes must be powers of two >= 4, got {n}"
        ))),
        None => Ok(()),
    }
}

fn run_trial(
    n: usize,
    variant: Variant,
    eps: f64,
    trial: usize,
    base_seed: u64,
    opts: CampaignOptions,
) -> ScalingExperimentRow {
    let seed = trial_seed(base_seed, n, trial);
    let mut row = ScalingExperimentRow {
        n,
        variant,
        trial_seed: seed,
        k: 0,
        runtime_ms: 0.0,
        residual_l1: f64::NAN,
        eps,
        error: None,
    };
    let s = match instance(base_seed, n, trial) {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let start = Instant::now();
    let result = bvn::decompose(&s, eps, variant, None);
    if opts.timing {
        row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    match result {
        Ok(d) => {
            row.k = d.len();
            row.residual_l1 = d.residual_l1;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// One row per (size, variant, trial). A failing trial becomes an error row
/// and does not abort the campaign.
pub fn run_scaling_experiment(
    sizes: &[usize],
    variants: &[Variant],
    eps: f64,
    trials: usize,
    base_seed: u64,
    opts: CampaignOptions,
) -> Result<Vec<ScalingExperimentRow>> {
    check_sizes(sizes)?;
    let jobs: Vec<(usize, Variant, usize)> = sizes
        .iter()
        .flat_map(|&n| {
            variants
                .iter()
                .flat_map(move |&v| (0..trials).map(move |t| (n, v, t)))
        })
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(n, v, t)| run_trial(n, v, eps, t, base_seed, opts))
        .collect())
}

/// Per-(size, variant) statistics over the successful rows, in first-seen order.
pub fn summarize(rows: &[ScalingExperimentRow]) -> Vec<ScalingSummary> {
    let mut keys: Vec<(usize, Variant)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.n, r.variant)) {
            keys.push((r.n, r.variant));
        }
    }
    keys.into_iter()
        .map(|(n, variant)| {
            let group: Vec<&ScalingExperimentRow> = rows
                .iter()
                .filter(|r| r.n == n && r.variant == variant)
                .collect();
            let ks: Vec<f64> = group
                .iter()
                .filter(|r| r.error.is_none())
                .map(|r| r.k as f64)
                .collect();
            let (mean_k, std_k) = mean_std(&ks);
            ScalingSummary {
                n,
                variant,
                trials: ks.len(),
                failed: group.len() - ks.len(),
                mean_k,
                std_k,
            }
        })
        .collect()
}

/// Largest-weight term counts at size `n` across a list of tolerances.
pub fn run_precision_experiment(
    n: usize,
    eps_list: &[f64],
    trials: usize,
    base_seed: u64,
) -> Result<Vec<PrecisionExperimentRow>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let no_timing = CampaignOptions { timing: false };
    Ok(eps_list
        .par_iter()
        .map(|&eps| {
            let rows: Vec<ScalingExperimentRow> = (0..trials)
                .into_par_iter()
                .map(|t| run_trial(n, Variant::LargestWeight, eps, t, base_seed, no_timing))
                .collect();
            let ks: Vec<f64> = rows
                .iter()
                .filter(|r| r.error.is_none())
                .map(|r| r.k as f64)
                .collect();
            let (mean_k, std_k) = mean_std(&ks);
            PrecisionExperimentRow {
                n,
                eps,
                mean_k,
                std_k,
                trials: ks.len(),
                failed: rows.len() - ks.len(),
            }
        })
        .collect())
}

/// Header line plus one record per row.
pub fn write_csv<T: CsvRow, W: Write>(rows: &[T], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(T::HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv<T: CsvRow>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(wrap)
}
