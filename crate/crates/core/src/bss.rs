//! Deterministic barrier-potential sparsifier.
//!
//! Keeps `A = sum_i y_i C_i` with every eigenvalue strictly between a lower
//! barrier `ell` and an upper barrier `u`. Each iteration advances both
//! barriers (`u += delta_U`, `ell += delta_L`) and adds one term `alpha C_j`
//! chosen so that neither potential
//!
//! ```text
//! Phi^u(A)  = trace (uI - A)^{-1}
//! Phi_ell(A) = trace (A - ell I)^{-1}
//! ```
//!
//! increases. After `T = ceil(4r / eps^2)` iterations the eigenvalue ratio
//! of `A` is at most `((2 + eps) / (2 - eps))^2`.

use crate::collection::{ReducedInstance, SparsifierResult};
use crate::error::{Error, Result};
use crate::linalg::{eigh, Spectrum, SymMatrix};
use crate::RunLimits;

/// Barrier schedule for a given `eps` and reduced dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BssParams {
    pub eps: f64,
    pub dim: usize,
    pub delta_l: f64,
    pub eps_l: f64,
    pub ell_0: f64,
    pub delta_u: f64,
    pub eps_u: f64,
    pub u_0: f64,
    pub rounds: usize,
}

impl BssParams {
    pub fn new(eps: f64, dim: usize) -> Result<Self> {
        crate::check_eps(eps)?;
        let n = dim as f64;
        let delta_l = 1.0;
        let eps_l = eps / 2.0;
        let delta_u = (2.0 + eps) / (2.0 - eps);
        let eps_u = eps / (2.0 * delta_u);
        let rounds = ((4.0 * n / (eps * eps)).ceil() as usize).max(1);
        Ok(BssParams {
            eps,
            dim,
            delta_l,
            eps_l,
            ell_0: -n / eps_l,
            delta_u,
            eps_u,
            u_0: n / eps_u,
            rounds,
        })
    }

    pub fn upper_barrier(&self, t: usize) -> f64 {
        self.u_0 + t as f64 * self.delta_u
    }

    pub fn lower_barrier(&self, t: usize) -> f64 {
        self.ell_0 + t as f64 * self.delta_l
    }

    /// `((2 + eps) / (2 - eps))^2`, the guaranteed eigenvalue ratio.
    pub fn ratio_bound(&self) -> f64 {
        self.delta_u * self.delta_u
    }
}

fn check_upper(spec: &Spectrum, u: f64) -> Result<()> {
    if spec.max() >= u {
        return Err(Error::BarrierViolated {
            eigenvalue: spec.max(),
            barrier: u,
        });
    }
    Ok(())
}

fn check_lower(spec: &Spectrum, ell: f64) -> Result<()> {
    if spec.min() <= ell {
        return Err(Error::BarrierViolated {
            eigenvalue: spec.min(),
            barrier: ell,
        });
    }
    Ok(())
}

fn upper_from_values(values: &[f64], u: f64) -> f64 {
    values.iter().map(|l| 1.0 / (u - l)).sum()
}

fn lower_from_values(values: &[f64], ell: f64) -> f64 {
    values.iter().map(|l| 1.0 / (l - ell)).sum()
}

/// `Phi^u(A) = sum_i 1 / (u - lambda_i)`.
pub fn phi_upper(a: &SymMatrix, u: f64) -> Result<f64> {
    let spec = eigh(a)?;
    check_upper(&spec, u)?;
    Ok(upper_from_values(&spec.eigenvalues, u))
}

/// `Phi_ell(A) = sum_i 1 / (lambda_i - ell)`.
pub fn phi_lower(a: &SymMatrix, ell: f64) -> Result<f64> {
    let spec = eigh(a)?;
    check_lower(&spec, ell)?;
    Ok(lower_from_values(&spec.eigenvalues, ell))
}

/// The matrices whose inner products with `X` give `U_A(X)`.
///
/// `U_A(X) = <M^-2, X> / (Phi^u(A) - Phi^u'(A)) + <M^-1, X>` with
/// `u' = u + delta_U` and `M = u'I - A`, which is `<G, X>` for
/// `G = M^-2 / gap + M^-1`.
#[derive(Clone, Debug)]
pub struct UpperShift {
    pub gradient: SymMatrix,
    pub potential: f64,
    pub shifted_potential: f64,
}

impl UpperShift {
    pub fn new(spec: &Spectrum, u: f64, delta_u: f64) -> Result<Self> {
        check_upper(spec, u)?;
        let u_next = u + delta_u;
        let potential = upper_from_values(&spec.eigenvalues, u);
        let shifted_potential = upper_from_values(&spec.eigenvalues, u_next);
        let gap = potential - shifted_potential;
        let gradient = spec.map(|l| {
            let inv = 1.0 / (u_next - l);
            inv * inv / gap + inv
        });
        Ok(UpperShift {
            gradient,
            potential,
            shifted_potential,
        })
    }

    pub fn bound(&self, x: &SymMatrix) -> f64 {
        self.gradient.inner(x)
    }
}

/// The matrix whose inner product with `X` gives `L_A(X)`:
/// `L_A(X) = <N^-2, X> / (Phi_ell'(A) - Phi_ell(A)) - <N^-1, X>` with
/// `ell' = ell + delta_L` and `N = A - ell'I`.
#[derive(Clone, Debug)]
pub struct LowerShift {
    pub gradient: SymMatrix,
    pub potential: f64,
    pub shifted_potential: f64,
}

impl LowerShift {
    pub fn new(spec: &Spectrum, ell: f64, delta_l: f64) -> Result<Self> {
        check_lower(spec, ell)?;
        let potential = lower_from_values(&spec.eigenvalues, ell);
        if potential > 1.0 / delta_l {
            return Err(Error::PotentialTooLarge {
                potential,
                limit: 1.0 / delta_l,
            });
        }
        let ell_next = ell + delta_l;
        check_lower(spec, ell_next)?;
        let shifted_potential = lower_from_values(&spec.eigenvalues, ell_next);
        let gap = shifted_potential - potential;
        let gradient = spec.map(|l| {
            let inv = 1.0 / (l - ell_next);
            inv * inv / gap - inv
        });
        Ok(LowerShift {
            gradient,
            potential,
            shifted_potential,
        })
    }

    pub fn bound(&self, x: &SymMatrix) -> f64 {
        self.gradient.inner(x)
    }
}

fn check_direction(x: &SymMatrix) -> Result<()> {
    if x.packed().iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(())
}

/// `U_A(X)`: any `alpha` with `1/alpha >= U_A(X)` keeps the top eigenvalue
/// below `u + delta_U` without raising the upper potential.
pub fn upper_shift_bound(a: &SymMatrix, x: &SymMatrix, u: f64, delta_u: f64) -> Result<f64> {
    check_direction(x)?;
    let spec = eigh(a)?;
    Ok(UpperShift::new(&spec, u, delta_u)?.bound(x))
}

/// `L_A(X)`: any `alpha` with `0 < 1/alpha <= L_A(X)` lifts the bottom
/// eigenvalue above `ell + delta_L` without raising the lower potential.
pub fn lower_shift_bound(a: &SymMatrix, x: &SymMatrix, ell: f64, delta_l: f64) -> Result<f64> {
    check_direction(x)?;
    let spec = eigh(a)?;
    Ok(LowerShift::new(&spec, ell, delta_l)?.bound(x))
}

/// Current iterate of the barrier method.
#[derive(Clone, Debug)]
pub struct BssState {
    pub a: SymMatrix,
    pub y: Vec<f64>,
    pub t: usize,
}

impl BssState {
    pub fn new(reduced: &ReducedInstance) -> Self {
        BssState {
            a: SymMatrix::zeros(reduced.rank()),
            y: vec![0.0; reduced.len()],
            t: 0,
        }
    }
}

/// The chosen term of one iteration together with the quantities used to
/// pick it.
#[derive(Clone, Debug, PartialEq)]
pub struct BssStep {
    pub index: usize,
    pub alpha: f64,
    pub upper: f64,
    pub lower: f64,
    pub sum_upper: f64,
    pub sum_lower: f64,
}

fn select_step(
    reduced: &ReducedInstance,
    upper: &UpperShift,
    lower: &LowerShift,
    iteration: usize,
) -> Result<BssStep> {
    let mut best: Option<(usize, f64, f64, f64)> = None;
    let mut sum_upper = 0.0;
    let mut sum_lower = 0.0;
    for (j, c) in reduced.members().iter().enumerate() {
        if reduced.trace(j) <= 0.0 {
            continue;
        }
        let u = upper.bound(c);
        let l = lower.bound(c);
        sum_upper += u;
        sum_lower += l;
        if u > 0.0 && l >= u {
            let gap = l - u;
            if best.is_none_or(|(_, g, _, _)| gap > g) {
                best = Some((j, gap, u, l));
            }
        }
    }
    match best {
        Some((index, _, u, l)) => Ok(BssStep {
            index,
            alpha: 2.0 / (u + l),
            upper: u,
            lower: l,
            sum_upper,
            sum_lower,
        }),
        None => Err(Error::StepNotFound {
            iteration,
            sum_lower,
            sum_upper,
        }),
    }
}

/// Picks `j` maximizing `L_A(C_j) - U_A(C_j)` among candidates with
/// `L >= U > 0` (lowest index on ties) and `alpha = 2 / (U + L)`.
/// `state.t` is the number of completed iterations.
pub fn bss_step(
    state: &BssState,
    reduced: &ReducedInstance,
    params: &BssParams,
) -> Result<BssStep> {
    let spec = eigh(&state.a)?;
    let upper = UpperShift::new(&spec, params.upper_barrier(state.t), params.delta_u)?;
    let lower = LowerShift::new(&spec, params.lower_barrier(state.t), params.delta_l)?;
    select_step(reduced, &upper, &lower, state.t + 1)
}

/// Per-iteration record of a barrier run.
#[derive(Clone, Debug, PartialEq)]
pub struct BssIterate {
    pub step: BssStep,
    /// `Phi^{u_{t-1}}(A(t-1))` and `Phi^{u_t}(A(t))`.
    pub upper_before: f64,
    pub upper_after: f64,
    pub lower_before: f64,
    pub lower_after: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub u: f64,
    pub ell: f64,
}

/// Outcome of a full barrier run.
#[derive(Clone, Debug)]
pub struct BssRun {
    pub params: BssParams,
    pub result: SparsifierResult,
    pub initial_upper: f64,
    pub initial_lower: f64,
    pub trace: Vec<BssIterate>,
}

/// Relative slack allowed when asserting that a potential did not grow.
const POTENTIAL_SLACK: f64 = 1e-10;

/// Runs the barrier method for `params.rounds` iterations and returns
/// `y(T) / lambda_min(A(T))`. Every step is re-checked: barriers are never
/// crossed and neither potential increases.
pub fn bss_run(reduced: &ReducedInstance, eps: f64, limits: &RunLimits) -> Result<BssRun> {
    let params = BssParams::new(eps, reduced.rank())?;
    let mut state = BssState::new(reduced);
    let mut spec = eigh(&state.a)?;
    let initial_upper = upper_from_values(&spec.eigenvalues, params.u_0);
    let initial_lower = lower_from_values(&spec.eigenvalues, params.ell_0);
    let mut trace = Vec::with_capacity(params.rounds);

    while state.t < params.rounds {
        limits.check(state.t)?;
        let u = params.upper_barrier(state.t);
        let ell = params.lower_barrier(state.t);
        let upper = UpperShift::new(&spec, u, params.delta_u)?;
        let lower = LowerShift::new(&spec, ell, params.delta_l)?;
        let step = select_step(reduced, &upper, &lower, state.t + 1)?;

        state.a.axpy(step.alpha, reduced.member(step.index));
        state.y[step.index] += step.alpha;
        state.t += 1;
        spec = eigh(&state.a)?;

        let u_next = params.upper_barrier(state.t);
        let ell_next = params.lower_barrier(state.t);
        let violated = |what: String| Error::InvariantViolated {
            iteration: state.t,
            what,
        };
        if spec.max() >= u_next || spec.min() <= ell_next {
            return Err(violated(format!(
                "spectrum [{}, {}] left ({}, {})",
                spec.min(),
                spec.max(),
                ell_next,
                u_next
            )));
        }
        let upper_after = upper_from_values(&spec.eigenvalues, u_next);
        let lower_after = lower_from_values(&spec.eigenvalues, ell_next);
        if upper_after > upper.potential * (1.0 + POTENTIAL_SLACK) {
            return Err(violated(format!(
                "upper potential grew from {} to {}",
                upper.potential, upper_after
            )));
        }
        if lower_after > lower.potential * (1.0 + POTENTIAL_SLACK) {
            return Err(violated(format!(
                "lower potential grew from {} to {}",
                lower.potential, lower_after
            )));
        }
        trace.push(BssIterate {
            step,
            upper_before: upper.potential,
            upper_after,
            lower_before: lower.potential,
            lower_after,
            lambda_min: spec.min(),
            lambda_max: spec.max(),
            u: u_next,
            ell: ell_next,
        });
    }

    let scale = 1.0 / spec.min();
    let y = state.y.iter().map(|v| v * scale).collect();
    let result = SparsifierResult::new(reduced, y, params.rounds)?;
    Ok(BssRun {
        params,
        result,
        initial_upper,
        initial_lower,
        trace,
    })
}

/// Barrier sparsifier with default limits.
pub fn bss_sparsify(reduced: &ReducedInstance, eps: f64) -> Result<SparsifierResult> {
    Ok(bss_run(reduced, eps, &RunLimits::default())?.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diagonal(d)
    }

    #[test]
    fn params_satisfy_balance_condition() {
        for &eps in &[0.1, 0.3, 0.5, 0.9] {
            let p = BssParams::new(eps, 7).unwrap();
            let lhs = 1.0 / p.delta_u + p.eps_u;
            let rhs = 1.0 / p.delta_l - p.eps_l;
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
            assert!(p.rounds >= 1);
        }
        assert!(BssParams::new(0.0, 3).is_err());
        assert!(BssParams::new(1.0, 3).is_err());
    }

    #[test]
    fn potentials() {
        assert_abs_diff_eq!(phi_upper(&SymMatrix::zeros(2), 2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            phi_upper(&SymMatrix::zeros(2), 3.0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            phi_upper(&diag(&[1.0, 2.0]), 4.0).unwrap(),
            5.0 / 6.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            phi_lower(&SymMatrix::scaled_identity(2, 2.0), 0.0).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(
            phi_lower(&SymMatrix::identity(3), -1.0).unwrap(),
            1.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            phi_lower(&diag(&[2.0, 3.0]), 1.0).unwrap(),
            1.5,
            epsilon = 1e-15
        );
        assert!(matches!(
            phi_upper(&diag(&[1.0, 2.0]), 2.0),
            Err(Error::BarrierViolated { .. })
        ));
        assert!(matches!(
            phi_lower(&diag(&[1.0, 2.0]), 1.0),
            Err(Error::BarrierViolated { .. })
        ));
    }

    #[test]
    fn upper_shift_examples() {
        // M = 3I: (2/9) / (1/3) + 2/3
        let v = upper_shift_bound(&SymMatrix::zeros(2), &SymMatrix::identity(2), 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 3.0, epsilon = 1e-14);
        let v = upper_shift_bound(&SymMatrix::zeros(1), &SymMatrix::identity(1), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        let x = diag(&[0.3, 1.7]);
        let a = diag(&[0.5, -0.25]);
        let base = upper_shift_bound(&a, &x, 2.0, 0.7).unwrap();
        let scaled = upper_shift_bound(&a, &x.scaled(3.5), 2.0, 0.7).unwrap();
        assert_abs_diff_eq!(scaled, 3.5 * base, epsilon = 1e-12);
        assert_eq!(
            upper_shift_bound(&a, &SymMatrix::zeros(2), 2.0, 0.7).unwrap_err(),
            Error::ZeroDirection
        );
    }

    #[test]
    fn lower_shift_examples() {
        let two = SymMatrix::scaled_identity(2, 2.0);
        let v = lower_shift_bound(&two, &SymMatrix::identity(2), 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 3.0, epsilon = 1e-14);
        let v = lower_shift_bound(&two, &SymMatrix::identity(2), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        let x = diag(&[0.3, 1.7]);
        let base = lower_shift_bound(&two, &x, 0.0, 0.5).unwrap();
        let scaled = lower_shift_bound(&two, &x.scaled(0.25), 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(scaled, 0.25 * base, epsilon = 1e-12);
        // Phi_0(diag(0.5, 0.5)) = 4 > 1/delta_L = 1
        assert!(matches!(
            lower_shift_bound(&SymMatrix::scaled_identity(2, 0.5), &x, 0.0, 1.0),
            Err(Error::PotentialTooLarge { .. })
        ));
    }

    #[test]
    fn step_on_coordinate_pair_respects_both_bounds() {
        let reduced =
            ReducedInstance::from_isotropic(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        let params = BssParams::new(0.5, 2).unwrap();
        let mut state = BssState::new(&reduced);
        let step = bss_step(&state, &reduced, &params).unwrap();
        // recompute U and L independently at A(0) = 0
        let c = reduced.member(step.index);
        let u = upper_shift_bound(&state.a, c, params.u_0, params.delta_u).unwrap();
        let l = lower_shift_bound(&state.a, c, params.ell_0, params.delta_l).unwrap();
        assert!(l >= 1.0 / step.alpha && 1.0 / step.alpha >= u);

        state.a.axpy(step.alpha, c);
        state.y[step.index] += step.alpha;
        state.t = 1;
        let step = bss_step(&state, &reduced, &params).unwrap();
        let c = reduced.member(step.index);
        let u = upper_shift_bound(&state.a, c, params.upper_barrier(1), params.delta_u).unwrap();
        let l = lower_shift_bound(&state.a, c, params.lower_barrier(1), params.delta_l).unwrap();
        assert!(l >= 1.0 / step.alpha && 1.0 / step.alpha >= u);
    }

    #[test]
    fn step_ties_pick_lowest_index() {
        let m = 4;
        let members = vec![SymMatrix::scaled_identity(3, 1.0 / m as f64); m];
        let reduced = ReducedInstance::from_isotropic(members).unwrap();
        let params = BssParams::new(0.5, 3).unwrap();
        let step = bss_step(&BssState::new(&reduced), &reduced, &params).unwrap();
        assert_eq!(step.index, 0);

        let single = ReducedInstance::from_isotropic(vec![SymMatrix::identity(1)]).unwrap();
        let params = BssParams::new(0.5, 1).unwrap();
        let step = bss_step(&BssState::new(&single), &single, &params).unwrap();
        assert_eq!(step.index, 0);
    }

    #[test]
    fn sparsify_coordinate_pair() {
        let reduced =
            ReducedInstance::from_isotropic(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        let run = bss_run(&reduced, 0.5, &RunLimits::default()).unwrap();
        assert_eq!(run.params.rounds, 32);
        let cert = &run.result.certificate;
        assert!(cert.ratio() <= 25.0 / 9.0 + 1e-6);
        assert!(cert.lambda_min >= 1.0 - 1e-7);
        assert!(cert.support_size <= 32);
        assert_abs_diff_eq!(run.initial_upper, run.params.eps_u, epsilon = 1e-12);
        assert_abs_diff_eq!(run.initial_lower, run.params.eps_l, epsilon = 1e-12);
    }

    #[test]
    fn sparsify_single_identity() {
        for n in [1, 3] {
            let reduced = ReducedInstance::from_isotropic(vec![SymMatrix::identity(n)]).unwrap();
            let res = bss_sparsify(&reduced, 0.4).unwrap();
            assert_eq!(res.y.len(), 1);
            assert!(res.y[0] > 0.0);
            assert_abs_diff_eq!(res.certificate.ratio(), 1.0, epsilon = 1e-12);
        }
    }
}
