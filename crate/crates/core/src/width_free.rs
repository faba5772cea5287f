//! Width-free matrix multiplicative weights sparsifier.
//!
//! Each round normalizes `exp(gamma A)` and `exp(-gamma A)` to trace one and
//! asks an oracle for a single term `alpha C_j` that raises
//! `trace exp(gamma A)` by at most a factor `1 + delta_U` while shrinking
//! `trace exp(-gamma A)` by at least `1 - delta_L`. No bound on the width
//! `alpha trace C_j` is needed, so `T = ceil(r ln r / eta^2)` rounds suffice
//! for eigenvalues of `A(T) / T` in `[1 - eps, 1 + eps]`.
//!
//! The same step conditions can be phrased with shifted exponential
//! potentials `Psi^u(A) = trace exp(-uI + gamma A)` and
//! `Psi_ell(A) = trace exp(ell I - gamma A)` that must simply not increase;
//! [`check_potential_equivalence`] evaluates both forms side by side.

use crate::collection::{ReducedInstance, SparsifierResult};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, log_sum_exp, normalized_exp, SymMatrix, EXP_LIMIT};
use crate::RunLimits;

/// Parameters for an `eps` target on a reduced dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WfParams {
    pub eps: f64,
    pub dim: usize,
    pub eta: f64,
    pub delta_u: f64,
    pub delta_l: f64,
    pub rounds: usize,
    pub gamma: f64,
}

impl WfParams {
    pub fn new(eps: f64, dim: usize) -> Result<Self> {
        crate::check_eps(eps)?;
        let n = dim as f64;
        let eta = eps / 2.0;
        let rounds = ((n * n.ln() / (eta * eta)).ceil() as usize).max(1);
        Ok(WfParams {
            eps,
            dim,
            eta,
            delta_u: eta / n,
            delta_l: eta / ((1.0 + eta) * n),
            rounds,
            gamma: eta / n,
        })
    }

    /// Same schedule with a different exponent scale.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// `ln(1 + delta_U)`.
    pub fn upper_shift(&self) -> f64 {
        self.delta_u.ln_1p()
    }

    /// `ln(1 / (1 - delta_L))`.
    pub fn lower_shift(&self) -> f64 {
        -(-self.delta_l).ln_1p()
    }

    /// Scale turning `A(T)` into the returned average, `n gamma / (eta T)`.
    pub fn output_scale(&self) -> f64 {
        self.dim as f64 * self.gamma / (self.eta * self.rounds as f64)
    }

    /// Upper end of the eigenvalue window guaranteed for `A(T) / T`:
    /// `ln(1 + delta_U) / gamma + ln n / (T gamma)`.
    pub fn upper_bound(&self) -> f64 {
        let t = self.rounds as f64;
        self.upper_shift() / self.gamma + (self.dim as f64).ln() / (t * self.gamma)
    }

    /// Lower end: `ln(1 / (1 - delta_L)) / gamma - ln n / (T gamma)`.
    pub fn lower_bound(&self) -> f64 {
        let t = self.rounds as f64;
        self.lower_shift() / self.gamma - (self.dim as f64).ln() / (t * self.gamma)
    }
}

/// Oracle answer: index, step length and the slack in the selection rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WfChoice {
    pub index: usize,
    pub alpha: f64,
    pub slack: f64,
}

/// Relative amount by which the selection slack may fall below zero before
/// the oracle reports infeasibility. The slacks sum to exactly zero with
/// the default parameters, so symmetric instances sit on the boundary.
const SLACK_TOL: f64 = 1e-9;

/// Finds `j` with `<X_L, C_j>/delta_L - trace C_j >= <X_U, C_j>/delta_U`,
/// choosing the largest slack (lowest index on ties), and sets `alpha` so
/// that `delta_U = (exp(gamma alpha trace C_j) - 1) <X_U, C_j> / trace C_j`.
pub fn wf_oracle(
    x_upper: &SymMatrix,
    x_lower: &SymMatrix,
    reduced: &ReducedInstance,
    params: &WfParams,
) -> Result<WfChoice> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, c) in reduced.members().iter().enumerate() {
        let tr = reduced.trace(j);
        if tr <= 0.0 {
            continue;
        }
        let lower_term = x_lower.inner(c) / params.delta_l;
        let upper_term = x_upper.inner(c) / params.delta_u;
        let slack = lower_term - tr - upper_term;
        let scale = lower_term.abs().max(tr).max(upper_term.abs());
        if best.is_none_or(|(_, s, _)| slack > s) {
            best = Some((j, slack, scale));
        }
    }
    let (index, slack, scale) = best.ok_or(Error::EmptyProblem)?;
    if slack < -SLACK_TOL * scale {
        return Err(Error::OracleInfeasible { best_slack: slack });
    }
    let tr = reduced.trace(index);
    let xu = x_upper.inner(reduced.member(index));
    let alpha = (params.delta_u * tr / xu).ln_1p() / (params.gamma * tr);
    Ok(WfChoice {
        index,
        alpha,
        slack,
    })
}

/// The two inequalities an oracle answer must satisfy, as
/// `(upper side, lower side)` margins `rhs - lhs` (nonnegative when they hold).
pub fn oracle_margins(
    x_upper: &SymMatrix,
    x_lower: &SymMatrix,
    c: &SymMatrix,
    alpha: f64,
    params: &WfParams,
) -> (f64, f64) {
    let tr = c.trace();
    let growth = (params.gamma * alpha * tr).exp_m1();
    let upper = params.delta_u - growth / tr * x_upper.inner(c);
    let shrink = -(-params.gamma * alpha * tr).exp_m1();
    let lower = shrink / tr * x_lower.inner(c) - params.delta_l;
    (upper, lower)
}

fn overflow_guard(value: f64) -> Result<f64> {
    if value > EXP_LIMIT {
        return Err(Error::ExpOverflow { exponent: value });
    }
    Ok(value)
}

/// `Psi^u(A) = trace exp(-uI + gamma A)`.
pub fn psi_upper(a: &SymMatrix, u: f64, gamma: f64) -> Result<f64> {
    Ok(overflow_guard(log_psi_upper(a, u, gamma)?)?.exp())
}

/// `Psi_ell(A) = trace exp(ell I - gamma A)`.
pub fn psi_lower(a: &SymMatrix, ell: f64, gamma: f64) -> Result<f64> {
    Ok(overflow_guard(log_psi_lower(a, ell, gamma)?)?.exp())
}

fn log_psi_upper(a: &SymMatrix, u: f64, gamma: f64) -> Result<f64> {
    let m = a.scaled(gamma).shifted(-u);
    Ok(log_sum_exp(&eigenvalues(&m)?))
}

fn log_psi_lower(a: &SymMatrix, ell: f64, gamma: f64) -> Result<f64> {
    let m = a.scaled(-gamma).shifted(ell);
    Ok(log_sum_exp(&eigenvalues(&m)?))
}

/// Both formulations of one step's potential conditions, as log-space
/// margins (`<= 0` when the condition holds).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialComparison {
    /// `ln Phi_U(t+1) - ln Phi_U(t) - ln(1 + delta_U)`.
    pub multiplicative_upper: f64,
    /// `ln Phi_L(t+1) - ln Phi_L(t) - ln(1 - delta_L)`.
    pub multiplicative_lower: f64,
    /// `ln Psi^{(t+1)Delta_U}(A + alpha X) - ln Psi^{t Delta_U}(A)`.
    pub shifted_upper: f64,
    /// `ln Psi_{(t+1)Delta_L}(A + alpha X) - ln Psi_{t Delta_L}(A)`.
    pub shifted_lower: f64,
}

/// Tolerance for agreement and for deciding that a condition holds.
pub const EQUIVALENCE_TOL: f64 = 1e-8;

impl PotentialComparison {
    pub fn multiplicative_holds(&self) -> bool {
        self.multiplicative_upper <= EQUIVALENCE_TOL && self.multiplicative_lower <= EQUIVALENCE_TOL
    }

    pub fn shifted_holds(&self) -> bool {
        self.shifted_upper <= EQUIVALENCE_TOL && self.shifted_lower <= EQUIVALENCE_TOL
    }
}

/// Evaluates the multiplicative conditions
/// `Phi_U(t+1) <= (1 + delta_U) Phi_U(t)`, `Phi_L(t+1) <= (1 - delta_L) Phi_L(t)`
/// and the shifted-barrier conditions
/// `Psi^{(t+1)Delta_U}(A + alpha X) <= Psi^{t Delta_U}(A)`,
/// `Psi_{(t+1)Delta_L}(A + alpha X) <= Psi_{t Delta_L}(A)`
/// for the step `A -> A + alpha X` taken after `t` completed rounds.
pub fn compare_potentials(
    a: &SymMatrix,
    x: &SymMatrix,
    alpha: f64,
    t: usize,
    params: &WfParams,
) -> Result<PotentialComparison> {
    let gamma = params.gamma;
    let mut next = a.clone();
    next.axpy(alpha, x);

    let phi_u = log_sum_exp(&eigenvalues(&a.scaled(gamma))?);
    let phi_u_next = log_sum_exp(&eigenvalues(&next.scaled(gamma))?);
    let phi_l = log_sum_exp(&eigenvalues(&a.scaled(-gamma))?);
    let phi_l_next = log_sum_exp(&eigenvalues(&next.scaled(-gamma))?);

    let du = params.upper_shift();
    let dl = params.lower_shift();
    let t0 = t as f64;
    let t1 = (t + 1) as f64;
    Ok(PotentialComparison {
        multiplicative_upper: phi_u_next - phi_u - params.delta_u.ln_1p(),
        multiplicative_lower: phi_l_next - phi_l - (-params.delta_l).ln_1p(),
        shifted_upper: log_psi_upper(&next, t1 * du, gamma)? - log_psi_upper(a, t0 * du, gamma)?,
        shifted_lower: log_psi_lower(&next, t1 * dl, gamma)? - log_psi_lower(a, t0 * dl, gamma)?,
    })
}

/// Checks that both formulations reach the same verdict with margins equal
/// to within [`EQUIVALENCE_TOL`] (relative). Returns `true` on agreement,
/// whether the shared verdict is accept or reject; any disagreement is
/// reported as [`Error::EquivalenceBroken`]. The shared verdict itself is
/// available from [`compare_potentials`].
pub fn check_potential_equivalence(
    a: &SymMatrix,
    x: &SymMatrix,
    alpha: f64,
    t: usize,
    params: &WfParams,
) -> Result<bool> {
    let cmp = compare_potentials(a, x, alpha, t, params)?;
    cmp.verdict().map(|_| true)
}

impl PotentialComparison {
    /// Shared verdict of both formulations, or the disagreement as an error.
    pub fn verdict(&self) -> Result<bool> {
        let pairs = [
            (self.multiplicative_upper, self.shifted_upper),
            (self.multiplicative_lower, self.shifted_lower),
        ];
        for (m, s) in pairs {
            if (m - s).abs() > EQUIVALENCE_TOL * m.abs().max(s.abs()).max(1.0) {
                return Err(Error::EquivalenceBroken {
                    multiplicative: m,
                    shifted: s,
                });
            }
        }
        let holds = self.multiplicative_holds();
        if holds != self.shifted_holds() {
            return Err(Error::EquivalenceBroken {
                multiplicative: self.multiplicative_upper.max(self.multiplicative_lower),
                shifted: self.shifted_upper.max(self.shifted_lower),
            });
        }
        Ok(holds)
    }
}

/// Accumulated state of a width-free run.
#[derive(Clone, Debug)]
pub struct WfState {
    pub a: SymMatrix,
    pub y: Vec<f64>,
    pub t: usize,
}

/// Per-round record.
#[derive(Clone, Debug, PartialEq)]
pub struct WfIterate {
    pub choice: WfChoice,
    /// `ln trace exp(gamma A)` before and after the round.
    pub log_upper_before: f64,
    pub log_upper_after: f64,
    /// `ln trace exp(-gamma A)` before and after the round.
    pub log_lower_before: f64,
    pub log_lower_after: f64,
    /// Shared verdict of the two potential formulations, when checked.
    /// A disagreement aborts the run with [`Error::EquivalenceBroken`].
    pub equivalence: Option<bool>,
}

#[derive(Clone, Debug, Default)]
pub struct WfOptions {
    /// Overrides the exponent scale `gamma = eta / n`.
    pub gamma: Option<f64>,
    /// Evaluate [`check_potential_equivalence`] on every round.
    pub check_equivalence: bool,
    pub limits: RunLimits,
}

#[derive(Clone, Debug)]
pub struct WfRun {
    pub params: WfParams,
    pub result: SparsifierResult,
    /// `A(T)` before averaging.
    pub accumulated: SymMatrix,
    pub trace: Vec<WfIterate>,
}

impl WfRun {
    pub fn indices(&self) -> Vec<usize> {
        self.trace.iter().map(|it| it.choice.index).collect()
    }
}

pub fn wf_run(reduced: &ReducedInstance, eps: f64, options: &WfOptions) -> Result<WfRun> {
    let mut params = WfParams::new(eps, reduced.rank())?;
    if let Some(gamma) = options.gamma {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        params = params.with_gamma(gamma);
    }
    let mut state = WfState {
        a: SymMatrix::zeros(reduced.rank()),
        y: vec![0.0; reduced.len()],
        t: 0,
    };
    let mut trace = Vec::with_capacity(params.rounds);
    let mut log_upper = log_sum_exp(&vec![0.0; reduced.rank()]);
    let mut log_lower = log_upper;

    while state.t < params.rounds {
        options.limits.check(state.t)?;
        let exponent = state.a.scaled(params.gamma);
        let x_upper = normalized_exp(&exponent)?;
        let x_lower = normalized_exp(&exponent.scaled(-1.0))?;
        let choice = wf_oracle(&x_upper, &x_lower, reduced, &params)?;
        let c = reduced.member(choice.index);

        let equivalence = if options.check_equivalence {
            Some(compare_potentials(&state.a, c, choice.alpha, state.t, &params)?.verdict()?)
        } else {
            None
        };

        state.a.axpy(choice.alpha, c);
        state.y[choice.index] += choice.alpha;
        state.t += 1;

        let values = eigenvalues(&state.a)?;
        overflow_guard(params.gamma * values[values.len() - 1])?;
        let up: Vec<f64> = values.iter().map(|l| params.gamma * l).collect();
        let down: Vec<f64> = values.iter().map(|l| -params.gamma * l).collect();
        let log_upper_after = log_sum_exp(&up);
        let log_lower_after = log_sum_exp(&down);
        trace.push(WfIterate {
            choice,
            log_upper_before: log_upper,
            log_upper_after,
            log_lower_before: log_lower,
            log_lower_after,
            equivalence,
        });
        log_upper = log_upper_after;
        log_lower = log_lower_after;
    }

    let scale = params.output_scale();
    let y = state.y.iter().map(|v| v * scale).collect();
    let result = SparsifierResult::new(reduced, y, params.rounds)?;
    Ok(WfRun {
        params,
        result,
        accumulated: state.a,
        trace,
    })
}

/// Width-free sparsifier with default options.
pub fn wf_sparsify(reduced: &ReducedInstance, eps: f64) -> Result<SparsifierResult> {
    Ok(wf_run(reduced, eps, &WfOptions::default())?.result)
}
