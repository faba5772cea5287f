//! Random sampling and its derandomization by pessimistic estimators.
//!
//! Both methods draw `T` indices from `p_i = trace C_i / r` and return
//! `y_j = count_j * r / (T trace C_j)`, so `sum_j y_j C_j` is the empirical
//! mean of `X = C_i / trace C_i` rescaled by `1 / mu = r`.
//!
//! [`aw_sample`] draws i.i.d. indices and succeeds with probability above
//! one half. [`pe_sparsify`] instead picks each index greedily to minimize
//! the sum of two pessimistic estimators, which keeps the failure bound
//! below one and therefore always succeeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collection::{ReducedInstance, SparsifierResult};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, log_sum_exp, SymMatrix};
use crate::RunLimits;

/// Which round count rule to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Smallest integer above `2 ln 2 (ln r + 2 ln 2) / (eps^2 mu)`.
    Random,
    /// Smallest integer above `2 ln 2 r ln(2r) / eps^2`.
    Derandomized,
}

/// Smallest integer strictly greater than `x`.
fn next_integer_above(x: f64) -> usize {
    (x.floor() as usize) + 1
}

/// Sampling distribution and round count.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingPlan {
    pub probabilities: Vec<f64>,
    pub mu: f64,
    pub eps: f64,
    pub rounds: usize,
    cumulative: Vec<f64>,
}

impl SamplingPlan {
    pub fn new(reduced: &ReducedInstance, eps: f64, method: Method) -> Result<Self> {
        crate::check_eps(eps)?;
        let r = reduced.rank() as f64;
        let probabilities: Vec<f64> = reduced.traces().iter().map(|&t| t.max(0.0) / r).collect();
        let mu = 1.0 / r;
        let c = 2.0 * std::f64::consts::LN_2;
        let bound = match method {
            Method::Random => c * (r.ln() + 2.0 * std::f64::consts::LN_2) / (eps * eps * mu),
            Method::Derandomized => c * r * (2.0 * r).ln() / (eps * eps),
        };
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(SamplingPlan {
            probabilities,
            mu,
            eps,
            rounds: next_integer_above(bound),
            cumulative,
        })
    }

    /// Index whose cumulative interval contains `u` in `[0, 1)`; members
    /// with zero probability are never returned.
    pub fn inverse_cdf(&self, u: f64) -> usize {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let target = u * total;
        let k = self.cumulative.partition_point(|&c| c <= target);
        let mut k = k.min(self.cumulative.len() - 1);
        while self.probabilities[k] <= 0.0 && k > 0 {
            k -= 1;
        }
        k
    }
}

/// `y_j = count_j r / (T trace C_j)`.
pub fn weights_from_counts(reduced: &ReducedInstance, counts: &[usize], rounds: usize) -> Vec<f64> {
    let r = reduced.rank() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if c == 0 {
                0.0
            } else {
                c as f64 * r / (rounds as f64 * reduced.trace(j))
            }
        })
        .collect()
}

/// Draws `T` i.i.d. indices with a ChaCha8 stream seeded by `seed`.
/// Success is not guaranteed; check the returned certificate.
pub fn aw_sample(reduced: &ReducedInstance, eps: f64, seed: u64) -> Result<SparsifierResult> {
    let plan = SamplingPlan::new(reduced, eps, Method::Random)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; reduced.len()];
    for _ in 0..plan.rounds {
        let u: f64 = rng.random();
        counts[plan.inverse_cdf(u)] += 1;
    }
    let y = weights_from_counts(reduced, &counts, plan.rounds);
    SparsifierResult::new(reduced, y, plan.rounds)
}

/// State of the greedy derandomization.
#[derive(Clone, Debug)]
pub struct PeState {
    pub plan: SamplingPlan,
    /// Exponent for the lower-tail estimator `phi`.
    pub t_lower: f64,
    /// Exponent for the upper-tail estimator `psi`.
    pub t_upper: f64,
    /// `ln || E exp(-t X) ||`.
    pub log_norm_lower: f64,
    /// `ln || E exp(t' X) ||`.
    pub log_norm_upper: f64,
    /// `sum_{tau <= i} X_{x_tau}`.
    pub sum: SymMatrix,
    pub picks: Vec<usize>,
    normalized: Vec<SymMatrix>,
}

/// `ln phi_i` and `ln psi_i` for a given partial sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimators {
    pub log_phi: f64,
    pub log_psi: f64,
}

impl Estimators {
    pub fn total(&self) -> f64 {
        self.log_phi.exp() + self.log_psi.exp()
    }
}

/// `t = ln((1 - (1 - eps) mu) / ((1 - mu)(1 - eps)))`.
pub fn lower_exponent(eps: f64, mu: f64) -> f64 {
    ((1.0 - (1.0 - eps) * mu) / ((1.0 - mu) * (1.0 - eps))).ln()
}

/// `t' = ln((1 + eps)(1 - mu) / (1 - (1 + eps) mu))`.
pub fn upper_exponent(eps: f64, mu: f64) -> f64 {
    ((1.0 + eps) * (1.0 - mu) / (1.0 - (1.0 + eps) * mu)).ln()
}

fn log_norm_of_mean_exp(plan: &SamplingPlan, normalized: &[SymMatrix], t: f64) -> Result<f64> {
    let dim = normalized[0].dim();
    let mut mean = SymMatrix::zeros(dim);
    for (x, &p) in normalized.iter().zip(&plan.probabilities) {
        if p > 0.0 {
            let spec = crate::linalg::eigh(x)?;
            mean.axpy(p, &spec.map(|l| (t * l).exp()));
        }
    }
    let values = eigenvalues(&mean)?;
    Ok(values[values.len() - 1].ln())
}

impl PeState {
    /// Sets up both estimators; fails with [`Error::TNotLargeEnough`] when
    /// `phi_0 + psi_0 >= 1`. Requires rank at least 2 so that
    /// `(1 + eps) mu < 1`.
    pub fn new(reduced: &ReducedInstance, eps: f64) -> Result<Self> {
        let plan = SamplingPlan::new(reduced, eps, Method::Derandomized)?;
        Self::with_plan(reduced, plan)
    }

    /// Same as [`PeState::new`] with an explicit round count.
    pub fn with_rounds(reduced: &ReducedInstance, eps: f64, rounds: usize) -> Result<Self> {
        let mut plan = SamplingPlan::new(reduced, eps, Method::Derandomized)?;
        plan.rounds = rounds;
        Self::with_plan(reduced, plan)
    }

    pub fn with_plan(reduced: &ReducedInstance, plan: SamplingPlan) -> Result<Self> {
        let state = Self::unchecked(reduced, plan)?;
        let value = state.current()?.total();
        if !(value < 1.0) {
            return Err(Error::TNotLargeEnough {
                value,
                rounds: state.plan.rounds,
            });
        }
        Ok(state)
    }

    fn unchecked(reduced: &ReducedInstance, plan: SamplingPlan) -> Result<Self> {
        let mu = plan.mu;
        let eps = plan.eps;
        if !((1.0 + eps) * mu < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "(1 + eps) mu = {} must be below 1",
                (1.0 + eps) * mu
            )));
        }
        let normalized: Vec<SymMatrix> = reduced
            .members()
            .iter()
            .zip(reduced.traces())
            .map(|(c, &t)| {
                if t > 0.0 {
                    c.scaled(1.0 / t)
                } else {
                    c.clone()
                }
            })
            .collect();
        let t_lower = lower_exponent(eps, mu);
        let t_upper = upper_exponent(eps, mu);
        let log_norm_lower = log_norm_of_mean_exp(&plan, &normalized, -t_lower)?;
        let log_norm_upper = log_norm_of_mean_exp(&plan, &normalized, t_upper)?;
        Ok(PeState {
            plan,
            t_lower,
            t_upper,
            log_norm_lower,
            log_norm_upper,
            sum: SymMatrix::zeros(reduced.rank()),
            picks: Vec::new(),
            normalized,
        })
    }

    pub fn rounds(&self) -> usize {
        self.plan.rounds
    }

    /// Per-round factors `ln a`, `ln b` with `phi_0 = r a^T`, `psi_0 = r b^T`.
    pub fn log_round_factors(&self) -> (f64, f64) {
        let mu = self.plan.mu;
        let eps = self.plan.eps;
        (
            self.t_lower * (1.0 - eps) * mu + self.log_norm_lower,
            -self.t_upper * (1.0 + eps) * mu + self.log_norm_upper,
        )
    }

    /// Smallest round count with `phi_0 + psi_0 < 1`.
    pub fn required_rounds(&self) -> Result<usize> {
        let (la, lb) = self.log_round_factors();
        if !(la < 0.0 && lb < 0.0) {
            return Err(Error::InvariantViolated {
                iteration: 0,
                what: format!("per-round estimator factors {la}, {lb} are not below 1"),
            });
        }
        let log_r = (self.sum.dim() as f64).ln();
        let below_one = |t: usize| log_sum_exp(&[la * t as f64, lb * t as f64]) + log_r < 0.0;
        // the slower estimator alone stays above one until T = ln r / |ln factor|
        let mut t = (log_r / -la.max(lb)).floor() as usize;
        while !below_one(t) {
            t += 1;
        }
        Ok(t)
    }

    pub fn step(&self) -> usize {
        self.picks.len()
    }

    /// Estimators at partial sum `sum` after `i` picks.
    pub fn estimators_at(&self, sum: &SymMatrix, i: usize) -> Result<Estimators> {
        let big_t = self.plan.rounds as f64;
        let mu = self.plan.mu;
        let eps = self.plan.eps;
        let remaining = (self.plan.rounds - i) as f64;
        let lower = eigenvalues(sum)?;
        let down: Vec<f64> = lower.iter().map(|l| -self.t_lower * l).collect();
        let up: Vec<f64> = lower.iter().map(|l| self.t_upper * l).collect();
        Ok(Estimators {
            log_phi: self.t_lower * big_t * (1.0 - eps) * mu
                + log_sum_exp(&down)
                + remaining * self.log_norm_lower,
            log_psi: -self.t_upper * big_t * (1.0 + eps) * mu
                + log_sum_exp(&up)
                + remaining * self.log_norm_upper,
        })
    }

    pub fn current(&self) -> Result<Estimators> {
        self.estimators_at(&self.sum, self.step())
    }

    /// Estimators after appending candidate `j`.
    pub fn candidate(&self, j: usize) -> Result<Estimators> {
        let mut next = self.sum.clone();
        next.axpy(1.0, &self.normalized[j]);
        self.estimators_at(&next, self.step() + 1)
    }

    fn push(&mut self, j: usize) {
        self.sum.axpy(1.0, &self.normalized[j]);
        self.picks.push(j);
    }

    /// Pick counts per member.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.normalized.len()];
        for &j in &self.picks {
            counts[j] += 1;
        }
        counts
    }
}

/// Sets up the estimators for an `eps` target.
pub fn pe_params(reduced: &ReducedInstance, eps: f64) -> Result<PeState> {
    PeState::new(reduced, eps)
}

/// Smallest round count for which the estimators start below one. The
/// default round rule can fall short of it (see [`Error::TNotLargeEnough`]).
pub fn pe_required_rounds(reduced: &ReducedInstance, eps: f64) -> Result<usize> {
    if reduced.rank() == 1 {
        return Ok(1);
    }
    let plan = SamplingPlan::new(reduced, eps, Method::Derandomized)?;
    PeState::unchecked(reduced, plan)?.required_rounds()
}

/// Outcome of one greedy step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeStep {
    pub index: usize,
    pub before: f64,
    pub after: f64,
    /// `sum_j p_j (phi + psi)(j)`, which the estimators keep below `before`.
    pub expected: f64,
}

/// Appends the index minimizing `phi + psi` (lowest index on ties).
pub fn pe_greedy_step(state: &mut PeState) -> Result<PeStep> {
    if state.step() >= state.rounds() {
        return Err(Error::InvalidParameter("all rounds already taken".into()));
    }
    let before = state.current()?.total();
    let mut best: Option<(usize, f64)> = None;
    let mut expected = 0.0;
    for j in 0..state.normalized.len() {
        let p = state.plan.probabilities[j];
        if p <= 0.0 {
            continue;
        }
        let value = state.candidate(j)?.total();
        expected += p * value;
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((j, value));
        }
    }
    let (index, after) = best.ok_or(Error::EmptyProblem)?;
    state.push(index);
    Ok(PeStep {
        index,
        before,
        after,
        expected,
    })
}

#[derive(Clone, Debug)]
pub struct PeRun {
    pub initial: f64,
    pub steps: Vec<PeStep>,
    pub result: SparsifierResult,
}

#[derive(Clone, Debug, Default)]
pub struct PeOptions {
    /// Overrides the default round count.
    pub rounds: Option<usize>,
    pub limits: RunLimits,
}

pub fn pe_run(reduced: &ReducedInstance, eps: f64, options: &PeOptions) -> Result<PeRun> {
    if reduced.rank() == 1 {
        return single_direction(reduced, eps);
    }
    let mut state = match options.rounds {
        Some(rounds) => PeState::with_rounds(reduced, eps, rounds)?,
        None => pe_params(reduced, eps)?,
    };
    let limits = &options.limits;
    let initial = state.current()?.total();
    let mut steps = Vec::with_capacity(state.rounds());
    while state.step() < state.rounds() {
        limits.check(state.step())?;
        let step = pe_greedy_step(&mut state)?;
        if step.after > step.before + 1e-12 {
            return Err(Error::InvariantViolated {
                iteration: state.step(),
                what: format!("estimator rose from {} to {}", step.before, step.after),
            });
        }
        steps.push(step);
    }
    let y = weights_from_counts(reduced, &state.counts(), state.rounds());
    let result = SparsifierResult::new(reduced, y, state.rounds())?;
    Ok(PeRun {
        initial,
        steps,
        result,
    })
}

/// With a one-dimensional range every normalized member equals `1`, so any
/// sequence of picks is exact; always pick the first admissible member.
fn single_direction(reduced: &ReducedInstance, eps: f64) -> Result<PeRun> {
    let plan = SamplingPlan::new(reduced, eps, Method::Derandomized)?;
    let first = (0..reduced.len())
        .find(|&j| plan.probabilities[j] > 0.0)
        .ok_or(Error::EmptyProblem)?;
    let mut counts = vec![0usize; reduced.len()];
    counts[first] = plan.rounds;
    let y = weights_from_counts(reduced, &counts, plan.rounds);
    Ok(PeRun {
        initial: 0.0,
        steps: Vec::new(),
        result: SparsifierResult::new(reduced, y, plan.rounds)?,
    })
}

/// [`pe_run`] with the default round count, falling back to
/// [`pe_required_rounds`] when the estimators would start at or above one.
pub fn pe_run_adaptive(reduced: &ReducedInstance, eps: f64, limits: &RunLimits) -> Result<PeRun> {
    let mut options = PeOptions {
        rounds: None,
        limits: limits.clone(),
    };
    match pe_run(reduced, eps, &options) {
        Err(Error::TNotLargeEnough { .. }) => {
            options.rounds = Some(pe_required_rounds(reduced, eps)?);
            pe_run(reduced, eps, &options)
        }
        other => other,
    }
}

/// The estimator state [`pe_run_adaptive`] starts from.
pub fn pe_params_adaptive(reduced: &ReducedInstance, eps: f64) -> Result<PeState> {
    match pe_params(reduced, eps) {
        Err(Error::TNotLargeEnough { .. }) => {
            PeState::with_rounds(reduced, eps, pe_required_rounds(reduced, eps)?)
        }
        other => other,
    }
}

/// Deterministic sampling-based sparsifier.
pub fn pe_sparsify(reduced: &ReducedInstance, eps: f64) -> Result<SparsifierResult> {
    Ok(pe_run_adaptive(reduced, eps, &RunLimits::default())?.result)
}
