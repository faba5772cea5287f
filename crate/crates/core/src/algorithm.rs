//! Uniform entry point over the five sparsifiers.

use std::fmt;
use std::str::FromStr;

use crate::block::block_run;
use crate::bss::bss_run;
use crate::collection::{reduce_to_identity, PsdCollection, ReducedInstance, SparsifierResult};
use crate::error::{Error, Result};
use crate::linalg::default_rank_tol;
use crate::sampling::{aw_sample, pe_run_adaptive};
use crate::width_free::{wf_run, WfOptions};
use crate::RunLimits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Bss,
    MmwumWf,
    MmwumBlock,
    AwSample,
    Pe,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Bss,
        Algorithm::MmwumWf,
        Algorithm::MmwumBlock,
        Algorithm::AwSample,
        Algorithm::Pe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bss => "bss",
            Algorithm::MmwumWf => "mmwum-wf",
            Algorithm::MmwumBlock => "mmwum-block",
            Algorithm::AwSample => "aw-sample",
            Algorithm::Pe => "pe",
        }
    }

    pub fn is_deterministic(self) -> bool {
        self != Algorithm::AwSample
    }

    /// Largest whitened eigenvalue ratio the algorithm guarantees at
    /// parameter `eps`.
    pub fn guaranteed_ratio(self, eps: f64) -> f64 {
        match self {
            Algorithm::Bss => ((2.0 + eps) / (2.0 - eps)).powi(2),
            _ => (1.0 + eps) / (1.0 - eps),
        }
    }

    /// Algorithm parameter whose guaranteed ratio is exactly `1 + target`.
    pub fn parameter_for_ratio(self, target: f64) -> f64 {
        match self {
            Algorithm::Bss => {
                let s = (1.0 + target).sqrt();
                2.0 * (s - 1.0) / (s + 1.0)
            }
            _ => target / (2.0 + target),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Seed for the sampling algorithm.
    pub seed: u64,
    pub limits: RunLimits,
}

/// Runs `algorithm` at its own parameter `eps` on a reduced instance.
/// The estimator-based method retries once with the smallest round count
/// that starts its estimators below one if the default count falls short.
pub fn run_algorithm(
    reduced: &ReducedInstance,
    algorithm: Algorithm,
    eps: f64,
    options: &RunOptions,
) -> Result<SparsifierResult> {
    let limits = options.limits.clone();
    match algorithm {
        Algorithm::Bss => Ok(bss_run(reduced, eps, &limits)?.result),
        Algorithm::MmwumWf => {
            let wf = WfOptions {
                limits,
                ..Default::default()
            };
            Ok(wf_run(reduced, eps, &wf)?.result)
        }
        Algorithm::MmwumBlock => Ok(block_run(reduced, eps, &limits)?.result),
        Algorithm::AwSample => aw_sample(reduced, eps, options.seed),
        Algorithm::Pe => Ok(pe_run_adaptive(reduced, eps, &limits)?.result),
    }
}

/// A sparsified collection: the whitened instance and weights normalized so
/// that `B <= sum_i y_i B_i`.
#[derive(Clone, Debug)]
pub struct Sparsified {
    pub reduced: ReducedInstance,
    pub result: SparsifierResult,
    /// Parameter the algorithm was run with.
    pub parameter: f64,
}

impl Sparsified {
    /// `B <= sum_i y_i B_i <= (1 + target) B` up to `tol`.
    pub fn meets(&self, target: f64, tol: f64) -> bool {
        self.result.certificate.passes(target, tol)
    }
}

/// Finds weights with `B <= sum_i y_i B_i <= (1 + target) B` (guaranteed
/// for every algorithm except the sampling one, which succeeds with
/// probability above one half).
pub fn sparsify_to_ratio(
    collection: &PsdCollection,
    algorithm: Algorithm,
    target: f64,
    options: &RunOptions,
) -> Result<Sparsified> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target must be positive, got {target}"
        )));
    }
    let reduced = reduce_to_identity(collection, default_rank_tol(collection.dim()))?;
    let parameter = algorithm.parameter_for_ratio(target);
    let raw = run_algorithm(&reduced, algorithm, parameter, options)?;
    let result = raw.normalized(&reduced)?;
    Ok(Sparsified {
        reduced,
        result,
        parameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bogus".parse::<Algorithm>().is_err());
    }

    #[test]
    fn calibration_inverts_guarantee() {
        for a in Algorithm::ALL {
            for target in [0.1, 0.5, 1.0] {
                let p = a.parameter_for_ratio(target);
                assert!(p > 0.0 && p < 1.0);
                assert_relative_eq!(a.guaranteed_ratio(p), 1.0 + target, max_relative = 1e-12);
            }
        }
    }
}
