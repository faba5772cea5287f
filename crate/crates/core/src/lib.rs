//! Spectral sparsification of sums of positive semidefinite matrices.
//!
//! Given PSD matrices `B_1, ..., B_m` with `B = sum_i B_i`, the sparsifiers in
//! this crate find nonnegative weights `y` with few nonzeros such that
//! `B <= sum_i y_i B_i <= (1 + eps) B`. Every algorithm works on the
//! whitened collection produced by [`reduce_to_identity`], where the members
//! sum to the identity on `range(B)`.
//!
//! | module | method | support |
//! |---|---|---|
//! | [`bss`] | barrier potentials | `O(n / eps^2)` |
//! | [`width_free`] | matrix multiplicative weights, unbounded width | `O(n log n / eps^2)` |
//! | [`block`] | matrix multiplicative weights, bounded width | `O(n log n / eps^2)` |
//! | [`sampling`] | i.i.d. sampling and its derandomization | `O(n log n / eps^2)` |
//!
//! The [`apps`] module builds collections for graph, hypergraph, SDP and
//! convex-hull problems. [`io`] holds the text formats and [`report`] the
//! batch runs behind the `sparsify` binary.

// `!(x < y)` style checks are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithm;
pub mod apps;
pub mod block;
pub mod bss;
pub mod collection;
pub mod error;
pub mod io;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod width_free;

use std::time::{Duration, Instant};

pub use algorithm::{run_algorithm, sparsify_to_ratio, Algorithm, RunOptions, Sparsified};
pub use collection::{
    reduce_to_identity, support_size, verify_sandwich, PsdCollection, RankOne, ReducedInstance,
    SandwichCertificate, SandwichVerdict, SparsifierResult,
};
pub use error::{Error, Result};
pub use linalg::{Spectrum, SymMatrix};
pub use report::{emit, run, AlgorithmConfig, InputKind, Param, RunInput, RunReport};

/// Environment variable holding a wall-clock budget in minutes.
pub const MAX_MINUTES_VAR: &str = "SPARSIFY_MAX_MINUTES";

/// Wall-clock budget for the iterative algorithms.
#[derive(Clone, Debug)]
pub struct RunLimits {
    deadline: Option<Instant>,
}

impl RunLimits {
    pub fn unlimited() -> Self {
        RunLimits { deadline: None }
    }

    pub fn with_minutes(minutes: f64) -> Self {
        let deadline = (minutes.is_finite() && minutes > 0.0)
            .then(|| Instant::now() + Duration::from_secs_f64(minutes * 60.0));
        RunLimits { deadline }
    }

    /// Reads the budget from `SPARSIFY_MAX_MINUTES`; unlimited when unset
    /// or unparsable.
    pub fn from_env() -> Self {
        match std::env::var(MAX_MINUTES_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
        {
            Some(m) => Self::with_minutes(m),
            None => Self::unlimited(),
        }
    }

    pub fn check(&self, iterations: usize) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::TimeBudgetExceeded { iterations }),
            _ => Ok(()),
        }
    }
}

impl Default for RunLimits {
    fn default() -> Self {
        Self::from_env()
    }
}

/// Accepts `eps` in the open interval `(0, 1)`.
pub fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )))
    }
}
