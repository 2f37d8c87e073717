//! Doubly stochastic matrices as linear combinations of permutations.
//!
//! * [`matrix`] - dense matrices, permutations, doubly-stochastic checks.
//! * [`sinkhorn`] - Sinkhorn scaling and block completion.
//! * [`matching`] - perfect, maximum-weight and bottleneck matchings.
//! * [`bvn`] - greedy Birkhoff-von Neumann decompositions and pruning.
//! * [`lcu`] - LCU resource accounting and the Pauli baseline.
//! * [`bench`] - seeded term-count experiments written as CSV.

// `!(x > 0.0)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bvn;
pub mod error;
pub mod io;
pub mod lcu;
pub mod matching;
pub mod matrix;
pub mod sinkhorn;

pub use bvn::{Decomposition, Residual, Term, Variant};
pub use error::{Error, Result};
pub use matching::{MatchingResult, SupportGraph};
pub use matrix::{Matrix, Permutation, ToleranceConfig};
pub use sinkhorn::{CompletionResult, ScalingResult};
