//! Greedy Birkhoff-von Neumann decompositions `S = sum_k w_k P_k`.
//!
//! Every variant runs the same loop: build the support graph of the residual
//! `R` (initially `S`), pick a perfect matching, subtract its smallest entry
//! along the matching, and stop once `||R||_1 <= eps` or no perfect matching
//! is left. `||R||_1` is the induced 1-norm by default, which on a residual
//! equals its common row/column sum `r`; see [`ResidualNorm`]. The variants
//! differ only in which matching they pick:
//!
//! | variant         | matching                                   |
//! |-----------------|--------------------------------------------|
//! | `Original`      | any (Hopcroft-Karp)                        |
//! | `LargestWeight` | maximum total weight                       |
//! | `Bottleneck`    | maximum smallest entry                     |
//! | `Threshold`     | any, on entries `> theta` only             |
//!
//! `CutoffPruned` is a post-processing of an existing decomposition, see
//! [`cutoff_prune`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{self, MatchingResult, SupportGraph};
use crate::matrix::{is_doubly_stochastic, Matrix, Permutation, ToleranceConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    #[serde(rename = "largest")]
    LargestWeight,
    Bottleneck,
    Threshold,
    #[serde(rename = "cutoff")]
    CutoffPruned,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Original,
        Variant::LargestWeight,
        Variant::Bottleneck,
        Variant::Threshold,
        Variant::CutoffPruned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::LargestWeight => "largest",
            Variant::Bottleneck => "bottleneck",
            Variant::Threshold => "threshold",
            Variant::CutoffPruned => "cutoff",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown variant {s:?}")))
    }
}

/// Norm of the residual compared against `eps` in the stopping rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualNorm {
    /// Largest absolute column sum. On a residual this is the common sum
    /// `r`, which is what the contraction argument behind
    /// [`bottleneck_term_bound`] tracks.
    #[default]
    Induced,
    /// Sum of all absolute entries, `N r` on a residual.
    Entrywise,
}

impl ResidualNorm {
    pub fn of(self, m: &Matrix) -> f64 {
        match self {
            ResidualNorm::Induced => m.induced_l1_norm(),
            ResidualNorm::Entrywise => m.l1_norm(),
        }
    }
}

impl FromStr for ResidualNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(ResidualNorm::Induced),
            "entrywise" => Ok(ResidualNorm::Entrywise),
            _ => Err(Error::Parse(format!("unknown residual norm {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DecomposeOptions {
    pub tolerances: ToleranceConfig,
    pub norm: ResidualNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub perm: Permutation,
}

/// What happened at one extraction step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Common row/column sum of the residual before the subtraction.
    pub common_sum: f64,
    /// Subtracted weight (smallest entry along the matching).
    pub weight: f64,
    /// Total residual weight along the chosen matching.
    pub matching_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Terms with normalized weights, in output order.
    pub terms: Vec<Term>,
    /// Weights before normalization, aligned with `terms`.
    pub raw_weights: Vec<f64>,
    /// `||S - sum_k raw_k P_k||_1` measured in `norm`.
    pub residual_l1: f64,
    pub norm: ResidualNorm,
    pub variant: Variant,
    pub epsilon: f64,
    pub theta: Option<f64>,
    /// Per-extraction trace; empty for pruned decompositions.
    pub steps: Vec<StepRecord>,
}

impl Decomposition {
    /// Number of terms `K`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.terms.first().map(|t| t.perm.len())
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    pub fn permutations(&self) -> impl Iterator<Item = &Permutation> {
        self.terms.iter().map(|t| &t.perm)
    }

    /// `sum_k raw_k P_k`.
    pub fn reconstruct_raw(&self) -> Option<Matrix> {
        let n = self.dim()?;
        let mut m = Matrix::zeros(n);
        for (t, &w) in self.terms.iter().zip(&self.raw_weights) {
            m.add_permutation(&t.perm, w);
        }
        Some(m)
    }
}

/// The matrix still to be decomposed together with its shared row/column sum.
#[derive(Clone, Debug)]
pub struct Residual {
    r: Matrix,
    common_sum: f64,
}

impl Residual {
    pub fn new(s: &Matrix) -> Self {
        let common_sum = s.as_slice().iter().sum::<f64>() / s.dim() as f64;
        Self {
            r: s.clone(),
            common_sum,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.r
    }

    pub fn common_sum(&self) -> f64 {
        self.common_sum
    }

    pub fn norm(&self, norm: ResidualNorm) -> f64 {
        norm.of(&self.r)
    }

    /// `R <- R - weight * P`.
    pub fn subtract(&mut self, perm: &Permutation, weight: f64) {
        self.r.add_permutation(perm, -weight);
        self.common_sum -= weight;
    }

    /// Largest deviation of a row or column sum from `common_sum`.
    pub fn sum_drift(&self) -> f64 {
        self.r.max_sum_deviation(self.common_sum)
    }
}

fn check_input(s: &Matrix, eps: f64, opts: &DecomposeOptions) -> Result<()> {
    let tol = &opts.tolerances;
    // the norm of S itself: 1 (induced) or N (entrywise)
    let start = match opts.norm {
        ResidualNorm::Induced => 1.0,
        ResidualNorm::Entrywise => s.dim() as f64,
    };
    if !(eps >= 0.0 && eps < start) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in [0, {start}), got {eps}"
        )));
    }
    if !is_doubly_stochastic(s, tol.ds_tolerance) {
        return Err(Error::NotDoublyStochastic {
            deviation: s.max_sum_deviation(1.0).max(-s.min_entry()),
            tol: tol.ds_tolerance,
        });
    }
    Ok(())
}

struct Extraction {
    perms: Vec<Permutation>,
    raw: Vec<f64>,
    steps: Vec<StepRecord>,
    residual: f64,
}

fn greedy(
    s: &Matrix,
    eps: f64,
    norm: ResidualNorm,
    edge_threshold: f64,
    select: fn(&SupportGraph) -> Option<MatchingResult>,
) -> Result<Extraction> {
    let n = s.dim();
    let cap = n * n + 1;
    let mut residual = Residual::new(s);
    let mut perms = Vec::new();
    let mut raw = Vec::new();
    let mut steps = Vec::new();

    while residual.norm(norm) > eps {
        if steps.len() == cap {
            return Err(Error::IterationCap(cap));
        }
        let graph = SupportGraph::new(residual.matrix(), edge_threshold);
        let Some(m) = select(&graph) else { break };
        let weight = m.min_edge;
        steps.push(StepRecord {
            common_sum: residual.common_sum(),
            weight,
            matching_weight: m.total_weight,
        });
        residual.subtract(&m.perm, weight);
        perms.push(m.perm);
        raw.push(weight);
    }
    if perms.is_empty() {
        return Err(Error::Degenerate);
    }
    Ok(Extraction {
        perms,
        raw,
        steps,
        residual: residual.norm(norm),
    })
}

fn normalized_terms(perms: Vec<Permutation>, raw: &[f64]) -> Vec<Term> {
    let total: f64 = raw.iter().sum();
    perms
        .into_iter()
        .zip(raw)
        .map(|(perm, &w)| Term {
            weight: w / total,
            perm,
        })
        .collect()
}

/// Runs one of the matching-driven variants with explicit tolerances.
/// `theta` is only consulted by [`Variant::Threshold`].
pub fn decompose_with(
    s: &Matrix,
    eps: f64,
    variant: Variant,
    theta: Option<f64>,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    check_input(s, eps, opts)?;
    let tol = &opts.tolerances;
    let (select, edge_threshold): (fn(&SupportGraph) -> Option<MatchingResult>, f64) = match variant
    {
        Variant::Original => (matching::perfect_matching, tol.zero_threshold),
        Variant::LargestWeight => (matching::max_weight_perfect_matching, tol.zero_threshold),
        Variant::Bottleneck => (matching::bottleneck_perfect_matching, tol.zero_threshold),
        Variant::Threshold => {
            let theta =
                theta.ok_or_else(|| Error::InvalidInput("threshold variant needs theta".into()))?;
            if !(theta >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "theta must be >= 0, got {theta}"
                )));
            }
            (matching::perfect_matching, theta.max(tol.zero_threshold))
        }
        Variant::CutoffPruned => {
            return Err(Error::InvalidInput(
                "cutoff pruning post-processes an existing decomposition".into(),
            ))
        }
    };
    let e = greedy(s, eps, opts.norm, edge_threshold, select)?;
    Ok(Decomposition {
        terms: normalized_terms(e.perms, &e.raw),
        raw_weights: e.raw,
        residual_l1: e.residual,
        norm: opts.norm,
        variant,
        epsilon: eps,
        theta: if variant == Variant::Threshold {
            theta
        } else {
            None
        },
        steps: e.steps,
    })
}

pub fn decompose_original(s: &Matrix, eps: f64) -> Result<Decomposition> {
    decompose_with(
        s,
        eps,
        Variant::Original,
        None,
        &DecomposeOptions::default(),
    )
}

pub fn decompose_largest_weight(s: &Matrix, eps: f64) -> Result<Decomposition> {
    decompose_with(
        s,
        eps,
        Variant::LargestWeight,
        None,
        &DecomposeOptions::default(),
    )
}

pub fn decompose_bottleneck(s: &Matrix, eps: f64) -> Result<Decomposition> {
    decompose_with(
        s,
        eps,
        Variant::Bottleneck,
        None,
        &DecomposeOptions::default(),
    )
}

/// Original greedy decomposition ignoring every residual entry `<= theta`.
/// The final `residual_l1` may exceed `eps`.
pub fn decompose_threshold(s: &Matrix, eps: f64, theta: f64) -> Result<Decomposition> {
    decompose_with(
        s,
        eps,
        Variant::Threshold,
        Some(theta),
        &DecomposeOptions::default(),
    )
}

/// Resolution of the binary search in [`find_threshold`].
pub const THRESHOLD_RESOLUTION: f64 = 1e-6;

/// Largest `theta` in `[0, max entry]` (to [`THRESHOLD_RESOLUTION`]) for which
/// [`decompose_threshold`] still reaches `residual_l1 <= eps`.
pub fn find_threshold(s: &Matrix, eps: f64) -> Result<f64> {
    find_threshold_with(s, eps, &DecomposeOptions::default())
}

pub fn find_threshold_with(s: &Matrix, eps: f64, opts: &DecomposeOptions) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!(
            "eps must be positive, got {eps}"
        )));
    }
    check_input(s, eps, opts)?;
    let meets = |theta: f64| match decompose_with(s, eps, Variant::Threshold, Some(theta), opts) {
        Ok(d) => d.residual_l1 <= eps,
        Err(_) => false,
    };
    let (mut lo, mut hi) = (0.0, s.max_entry());
    while hi - lo > THRESHOLD_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if meets(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Keeps the heaviest terms of `d`: sorts by raw weight and discards the
/// smallest term while `||s - sum_kept w~_k P_k||_F <= tol`, with the kept raw
/// weights renormalized to sum 1. At least one term is always kept.
pub fn cutoff_prune(d: &Decomposition, s: &Matrix, tol: f64) -> Result<Decomposition> {
    let Some(n) = d.dim() else {
        return Err(Error::InvalidInput("empty decomposition".into()));
    };
    s.check_dim(n)?;

    let mut order: Vec<usize> = (0..d.len()).collect();
    // heaviest first; ties keep extraction order
    order.sort_by(|&a, &b| d.raw_weights[b].total_cmp(&d.raw_weights[a]));

    let mut partial = d.reconstruct_raw().expect("non-empty");
    let mut total: f64 = d.raw_weights.iter().sum();
    let error_of = |partial: &Matrix, total: f64| {
        let n2 = s.as_slice().len();
        (0..n2)
            .map(|k| {
                let diff = s.as_slice()[k] - partial.as_slice()[k] / total;
                diff * diff
            })
            .sum::<f64>()
            .sqrt()
    };

    let full_error = error_of(&partial, total);
    if full_error > tol {
        return Err(Error::ToleranceTooTight {
            error: full_error,
            tol,
        });
    }

    let mut kept = order.len();
    while kept > 1 {
        let idx = order[kept - 1];
        let w = d.raw_weights[idx];
        let mut trial = partial.clone();
        trial.add_permutation(&d.terms[idx].perm, -w);
        if error_of(&trial, total - w) > tol {
            break;
        }
        partial = trial;
        total -= w;
        kept -= 1;
    }

    let kept_idx = &order[..kept];
    let raw_weights: Vec<f64> = kept_idx.iter().map(|&i| d.raw_weights[i]).collect();
    let perms: Vec<Permutation> = kept_idx.iter().map(|&i| d.terms[i].perm.clone()).collect();
    let mut raw_recon = Matrix::zeros(n);
    for (p, &w) in perms.iter().zip(&raw_weights) {
        raw_recon.add_permutation(p, w);
    }
    let residual_l1 = d.norm.of(&s.sub(&raw_recon)?);
    Ok(Decomposition {
        terms: normalized_terms(perms, &raw_weights),
        raw_weights,
        residual_l1,
        norm: d.norm,
        variant: Variant::CutoffPruned,
        epsilon: tol,
        theta: None,
        steps: Vec::new(),
    })
}

/// Full original decomposition (`eps = 0`) pruned to Frobenius error `tol`.
pub fn decompose_cutoff(s: &Matrix, tol: f64) -> Result<Decomposition> {
    decompose_cutoff_with(s, tol, &DecomposeOptions::default())
}

pub fn decompose_cutoff_with(
    s: &Matrix,
    tol: f64,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    let full = decompose_with(s, 0.0, Variant::Original, None, opts)?;
    cutoff_prune(&full, s, tol)
}

/// Dispatches on `variant`. `Threshold` without an explicit `theta` runs
/// [`find_threshold`] first; `CutoffPruned` uses `eps` as the Frobenius
/// tolerance of [`decompose_cutoff`].
pub fn decompose(
    s: &Matrix,
    eps: f64,
    variant: Variant,
    theta: Option<f64>,
) -> Result<Decomposition> {
    decompose_configured(s, eps, variant, theta, &DecomposeOptions::default())
}

/// [`decompose`] with explicit tolerances and stopping norm.
pub fn decompose_configured(
    s: &Matrix,
    eps: f64,
    variant: Variant,
    theta: Option<f64>,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    match variant {
        Variant::Threshold => {
            let theta = match theta {
                Some(t) => t,
                None => find_threshold_with(s, eps, opts)?,
            };
            decompose_with(s, eps, Variant::Threshold, Some(theta), opts)
        }
        Variant::CutoffPruned => decompose_cutoff_with(s, eps, opts),
        v => decompose_with(s, eps, v, None, opts),
    }
}

/// `sum_k w_k P_k` with the normalized weights.
pub fn reconstruct(d: &Decomposition) -> Option<Matrix> {
    let n = d.dim()?;
    let mut m = Matrix::zeros(n);
    for t in &d.terms {
        m.add_permutation(&t.perm, t.weight);
    }
    Some(m)
}

/// Worst-case term count of the original greedy method, `N^2 - 2N + 2`.
pub fn original_term_bound(n: usize) -> usize {
    n * n + 2 - 2 * n
}

/// `ceil(N ln(1/eps))`, the term count the bottleneck variant reaches when
/// every step removes at least `r/N`.
///
/// That per-step guarantee does not hold for every residual: the doubly
/// stochastic `[[.3, .4, .3], [.25, .5, .25], [.45, .1, .45]]` has no diagonal
/// with all entries above `0.3 < 1/3`. What always holds is a step of at least
/// `r / (N^2 - 2N + 2)`, so treat this as the typical count, not a ceiling.
pub fn bottleneck_term_bound(n: usize, eps: f64) -> usize {
    (n as f64 * (1.0 / eps).ln()).ceil() as usize
}
