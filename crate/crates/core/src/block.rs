//! Matrix multiplicative weights with two blocks and a width-bounded oracle.
//!
//! Block 1 tracks `sum_i y_i C_i - I` against the lower edge and block 2
//! tracks its negation against the upper edge. Each round asks for a single
//! term `alpha C_j` with `alpha trace C_j <= rho = (1 + eta) n / eta`; after
//! `T = O(n log n / eps^3)` rounds the average has spectrum in
//! `[1 - eps, 1 + eps]`.

use crate::collection::{PsdCollection, ReducedInstance, SparsifierResult};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, normalized_exp, SymMatrix};
use crate::RunLimits;

/// Number of blocks. Only the two-block shape is needed here.
pub const BLOCKS: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockParams {
    pub eps: f64,
    pub dim: usize,
    pub beta: f64,
    pub eta: f64,
    pub ell: f64,
    pub rho: f64,
    pub rounds: usize,
}

impl BlockParams {
    pub fn new(eps: f64, dim: usize) -> Result<Self> {
        crate::check_eps(eps)?;
        let n = dim as f64;
        let beta = eps / 4.0;
        let eta = eps / 8.0;
        let ell = 1.0;
        let rho = (1.0 + eta) * n / eta;
        let rounds = ((2.0 * (rho + ell) * n.ln() / (beta * eps)).ceil() as usize).max(1);
        Ok(BlockParams {
            eps,
            dim,
            beta,
            eta,
            ell,
            rho,
            rounds,
        })
    }

    /// `beta ell + (rho + ell) ln n / (T beta) + (1 + beta) eta`.
    pub fn error_bound(&self) -> f64 {
        let n = self.dim as f64;
        self.beta * self.ell
            + (self.rho + self.ell) * n.ln() / (self.rounds as f64 * self.beta)
            + (1.0 + self.beta) * self.eta
    }

    /// Exponent scale `beta / (ell + rho)` of the weight matrices.
    pub fn weight_scale(&self) -> f64 {
        self.beta / (self.ell + self.rho)
    }
}

/// Running exponent sums `S_k`; the weights are `W_k = exp(-scale S_k)`.
#[derive(Clone, Debug)]
pub struct BlockState {
    pub sums: [SymMatrix; BLOCKS],
    pub y_sum: Vec<f64>,
    pub t: usize,
}

impl BlockState {
    pub fn new(reduced: &ReducedInstance) -> Self {
        let r = reduced.rank();
        BlockState {
            sums: [SymMatrix::zeros(r), SymMatrix::zeros(r)],
            y_sum: vec![0.0; reduced.len()],
            t: 0,
        }
    }

    /// Trace-normalized `W_k`. The oracle conditions are homogeneous in
    /// each `X_k`, so normalizing does not change its answer.
    pub fn weights(&self, params: &BlockParams) -> Result<[SymMatrix; BLOCKS]> {
        let s = -params.weight_scale();
        Ok([
            normalized_exp(&self.sums[0].scaled(s))?,
            normalized_exp(&self.sums[1].scaled(s))?,
        ])
    }

    /// Adds round `t`'s loss `alpha C_j - I + l_k I` to each block, with
    /// `l_1 = +ell` and `l_2 = -ell`.
    fn push(&mut self, c: &SymMatrix, index: usize, alpha: f64, ell: f64) {
        self.sums[0].axpy(alpha, c);
        self.sums[0] = self.sums[0].shifted(ell - 1.0);
        self.sums[1].axpy(-alpha, c);
        self.sums[1] = self.sums[1].shifted(1.0 - ell);
        self.y_sum[index] += alpha;
        self.t += 1;
    }
}

/// Oracle answer with the quantities it was chosen on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockChoice {
    pub index: usize,
    pub alpha: f64,
    /// `p_j = <X_1, C_j> / trace X_1`.
    pub p: f64,
    /// `alpha trace C_j`.
    pub width: f64,
}

/// Picks `j` with `<X_2, C_j> / p_j <= (1 + eta) trace X_2` and
/// `trace C_j / p_j <= (1 + eta) n / eta`, preferring the smallest width
/// `trace C_j / p_j` (lowest index on ties), and returns `alpha = 1 / p_j`.
pub fn block_oracle(
    x1: &SymMatrix,
    x2: &SymMatrix,
    reduced: &ReducedInstance,
    eta: f64,
) -> Result<BlockChoice> {
    let n = reduced.rank() as f64;
    let rho = (1.0 + eta) * n / eta;
    let tr1 = x1.trace();
    let tr2 = x2.trace();
    let mut best: Option<BlockChoice> = None;
    let mut closest = f64::INFINITY;
    for (j, c) in reduced.members().iter().enumerate() {
        let tr = reduced.trace(j);
        let p = x1.inner(c) / tr1;
        if tr <= 0.0 || !(p > 0.0) {
            continue;
        }
        let alpha = 1.0 / p;
        let width = alpha * tr;
        let x2_excess = alpha * x2.inner(c) / ((1.0 + eta) * tr2) - 1.0;
        let width_excess = width / rho - 1.0;
        closest = closest.min(x2_excess.max(width_excess));
        if x2_excess <= 0.0 && width_excess <= 0.0 && best.is_none_or(|b| width < b.width) {
            best = Some(BlockChoice {
                index: j,
                alpha,
                p,
                width,
            });
        }
    }
    best.ok_or(Error::OracleInfeasible {
        best_slack: -closest,
    })
}

/// Per-round record.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockIterate {
    pub choice: BlockChoice,
    /// Extreme eigenvalues of `alpha C_j - I`.
    pub loss_min: f64,
    pub loss_max: f64,
}

#[derive(Clone, Debug)]
pub struct BlockRun {
    pub params: BlockParams,
    pub result: SparsifierResult,
    pub trace: Vec<BlockIterate>,
}

pub fn block_run(reduced: &ReducedInstance, eps: f64, limits: &RunLimits) -> Result<BlockRun> {
    let params = BlockParams::new(eps, reduced.rank())?;
    let mut state = BlockState::new(reduced);
    let mut trace = Vec::with_capacity(params.rounds);
    while state.t < params.rounds {
        limits.check(state.t)?;
        let [x1, x2] = state.weights(&params)?;
        let choice = block_oracle(&x1, &x2, reduced, params.eta)?;
        let c = reduced.member(choice.index);
        let loss = eigenvalues(&c.scaled(choice.alpha).shifted(-1.0))?;
        let loss_min = loss[0];
        let loss_max = loss[loss.len() - 1];
        if loss_min < -params.ell - 1e-9 || loss_max > params.rho + 1e-9 * params.rho {
            return Err(Error::InvariantViolated {
                iteration: state.t,
                what: format!("loss spectrum [{loss_min}, {loss_max}] outside [-ell, rho]"),
            });
        }
        state.push(c, choice.index, choice.alpha, params.ell);
        trace.push(BlockIterate {
            choice,
            loss_min,
            loss_max,
        });
    }
    let inv = 1.0 / params.rounds as f64;
    let y = state.y_sum.iter().map(|v| v * inv).collect();
    let result = SparsifierResult::new(reduced, y, params.rounds)?;
    Ok(BlockRun {
        params,
        result,
        trace,
    })
}

pub fn block_sparsify(reduced: &ReducedInstance, eps: f64) -> Result<SparsifierResult> {
    Ok(block_run(reduced, eps, &RunLimits::default())?.result)
}

/// Instance meant to force every answer of the width-bounded oracle to have
/// `alpha trace B >= (1 - eta) n / (9 eta)`. This holds only for small
/// `eta` (below roughly 0.0769); above that the first two member patterns
/// admit narrower answers, which [`feasible_alpha_interval`] exposes.
#[derive(Clone, Debug)]
pub struct WidthFixture {
    pub k: usize,
    pub eta: f64,
    pub collection: PsdCollection,
    /// Pattern (1, 2 or 3) each member was built from.
    pub types: Vec<u8>,
    pub x1: SymMatrix,
    pub x2: SymMatrix,
    pub lower_bound: f64,
}

/// Builds the `n = 3k` instance with `zeta = 3 eta`,
/// `X_1 = diag(1, zeta^3, zeta) (x) I_k`, `X_2 = diag(1, zeta^-3, zeta^-1) (x) I_k`
/// and rank-one members from `[1, -1, 0]/sqrt 2`, `[1, 1, 0]/sqrt 2`,
/// `[0, 0, 1]` tensored with each `e_j`. Requires
/// `(1 + eta) / (1 - eta) < 1 + 3 eta`, i.e. `0 < eta < 1/3`.
pub fn oracle_width_fixture(k: usize, eta: f64) -> Result<WidthFixture> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if !(eta > 0.0 && (1.0 + eta) / (1.0 - eta) < 1.0 + 3.0 * eta) {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} violates (1 + eta) / (1 - eta) < 1 + 3 eta"
        )));
    }
    let n = 3 * k;
    let zeta = 3.0 * eta;
    let z3 = zeta.powi(3);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for (a, b) in [(1.0, 1.0), (z3, 1.0 / z3), (zeta, 1.0 / zeta)] {
        d1.extend(std::iter::repeat_n(a, k));
        d2.extend(std::iter::repeat_n(b, k));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let patterns: [(u8, [f64; 3]); 3] = [(1, [h, -h, 0.0]), (2, [h, h, 0.0]), (3, [0.0, 0.0, 1.0])];
    let mut matrices = Vec::with_capacity(n);
    let mut types = Vec::with_capacity(n);
    for (kind, pattern) in patterns {
        for j in 0..k {
            let mut v = vec![0.0; n];
            for (block, &entry) in pattern.iter().enumerate() {
                v[block * k + j] = entry;
            }
            matrices.push(SymMatrix::outer(&v, 1.0));
            types.push(kind);
        }
    }
    Ok(WidthFixture {
        k,
        eta,
        collection: PsdCollection::from_matrices(matrices)?,
        types,
        x1: SymMatrix::from_diagonal(&d1),
        x2: SymMatrix::from_diagonal(&d2),
        lower_bound: (1.0 - eta) * n as f64 / (9.0 * eta),
    })
}

/// Closed-form set of `alpha >= 0` satisfying
/// `alpha <X_1, B> >= (1 - eta) trace X_1`, `alpha <X_2, B> <= (1 + eta) trace X_2`
/// and `alpha trace B <= rho`, as an interval, or `None` if empty.
pub fn feasible_alpha_interval(
    b: &SymMatrix,
    x1: &SymMatrix,
    x2: &SymMatrix,
    eta: f64,
    rho: f64,
) -> Option<(f64, f64)> {
    let a1 = x1.inner(b);
    if !(a1 > 0.0) {
        return None;
    }
    let lo = (1.0 - eta) * x1.trace() / a1;
    let a2 = x2.inner(b);
    let mut hi = if a2 > 0.0 {
        (1.0 + eta) * x2.trace() / a2
    } else {
        f64::INFINITY
    };
    let tr = b.trace();
    if tr > 0.0 {
        hi = hi.min(rho / tr);
    }
    (lo <= hi).then_some((lo, hi))
}

/// Whether `(b, alpha)` satisfies the three oracle inequalities directly.
pub fn oracle_answer_feasible(
    b: &SymMatrix,
    alpha: f64,
    x1: &SymMatrix,
    x2: &SymMatrix,
    eta: f64,
    rho: f64,
) -> bool {
    alpha >= 0.0
        && alpha * x1.inner(b) >= (1.0 - eta) * x1.trace()
        && alpha * x2.inner(b) <= (1.0 + eta) * x2.trace()
        && alpha * b.trace() <= rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rounds_for_rank_ten() {
        let p = BlockParams::new(0.5, 10).unwrap();
        assert_abs_diff_eq!(p.eta, 0.0625);
        assert_abs_diff_eq!(p.rho, 170.0, epsilon = 1e-12);
        // 2 * 171 * ln 10 / 0.0625 = 12599.75
        let exact = 2.0 * 171.0 * 10f64.ln() / (0.125 * 0.5);
        assert!(exact > 12599.7 && exact < 12599.8);
        assert_eq!(p.rounds, 12600);
        assert!(p.error_bound() <= 0.5);
    }

    #[test]
    fn error_bound_unceiled() {
        for eps in [0.1, 0.3, 0.5, 0.9] {
            for n in [2, 7, 30] {
                let p = BlockParams::new(eps, n).unwrap();
                assert!(p.error_bound() <= eps + 1e-12);
            }
        }
    }

    #[test]
    fn oracle_coordinate_pair() {
        let reduced = ReducedInstance::from_isotropic(vec![
            SymMatrix::from_diagonal(&[1.0, 0.0]),
            SymMatrix::from_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let x = SymMatrix::identity(2);
        let c = block_oracle(&x, &x, &reduced, 1.0).unwrap();
        assert_eq!(c.index, 0);
        assert_abs_diff_eq!(c.p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.alpha, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn oracle_single_identity() {
        let reduced = ReducedInstance::from_isotropic(vec![SymMatrix::identity(3)]).unwrap();
        let x = SymMatrix::identity(3);
        let c = block_oracle(&x, &x, &reduced, 0.1).unwrap();
        assert_eq!(c.index, 0);
        assert_abs_diff_eq!(c.alpha, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coordinate_pair_run() {
        let reduced = ReducedInstance::from_isotropic(vec![
            SymMatrix::from_diagonal(&[1.0, 0.0]),
            SymMatrix::from_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let run = block_run(&reduced, 0.5, &RunLimits::unlimited()).unwrap();
        assert!(run.result.certificate.within(0.5 - 1e-6, 1.5 + 1e-6));
        assert!(run.trace.iter().all(|it| it.choice.width <= run.params.rho));
    }

    #[test]
    fn fixture_layout() {
        let f = oracle_width_fixture(1, 0.1).unwrap();
        assert_abs_diff_eq!(f.x1.get(1, 1), 0.027, epsilon = 1e-15);
        assert_abs_diff_eq!(f.x1.get(2, 2), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(f.lower_bound, 3.0, epsilon = 1e-12);
        let sum = f.collection.sum();
        assert_abs_diff_eq!(
            sum.sub(&SymMatrix::identity(3)).frobenius_norm(),
            0.0,
            epsilon = 1e-12
        );
        assert!(oracle_width_fixture(1, 0.4).is_err());
    }
}
