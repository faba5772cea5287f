//! Why the members must be PSD: `{2I} U {E_ij}` with
//! `E_ij = e_i e_j^T + e_j e_i^T` sums to `I + J`, and none of its
//! coordinates can be dropped.
//!
//! [`necessity_margin`] evaluates `<sum_k y_k M_k - (1 - eps) B, D>` for the
//! test direction `D = E_ab` (or `I` for the `2I` member). It equals
//! `2 y_ab - 2(1 - eps)` (resp. `2n y_0 - 2n(1 - eps)`), so it is negative
//! whenever that coordinate is zero.
//!
//! The directions `E_ab` are indefinite, so a negative margin does not by
//! itself rule out `(1 - eps) B <= sum_k y_k M_k`. For `n = 2`,
//! `y = (1.5, 0)` gives `3I >= (1 - eps)(I + J)` for every `eps` in `(0, 1)`;
//! [`lower_bound_holds`] checks that inequality directly.

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, SymMatrix};

/// Index pairs `(i, j)`, `i < j`, in the order the `E_ij` appear after `2I`.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// `[2I, E_01, E_02, ..., E_{n-2,n-1}]`. Only the first member is PSD.
pub fn psd_counterexample(n: usize) -> Result<Vec<SymMatrix>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut out = vec![SymMatrix::scaled_identity(n, 2.0)];
    for (i, j) in pairs(n) {
        let mut e = SymMatrix::zeros(n);
        e.set(i, j, 1.0);
        out.push(e);
    }
    Ok(out)
}

fn weighted(members: &[SymMatrix], y: &[f64]) -> SymMatrix {
    let mut acc = SymMatrix::zeros(members[0].dim());
    for (m, &w) in members.iter().zip(y) {
        acc.axpy(w, m);
    }
    acc
}

/// Test direction for coordinate `k`: `I` for `k = 0`, else `E_ab`.
pub fn test_direction(n: usize, k: usize) -> SymMatrix {
    if k == 0 {
        SymMatrix::identity(n)
    } else {
        let (a, b) = pairs(n)[k - 1];
        let mut e = SymMatrix::zeros(n);
        e.set(a, b, 1.0);
        e
    }
}

/// `<sum_k y_k M_k - (1 - eps) B, D_k>` for coordinate `k`.
pub fn necessity_margin(members: &[SymMatrix], y: &[f64], eps: f64, k: usize) -> f64 {
    let n = members[0].dim();
    let total = weighted(members, &vec![1.0; members.len()]);
    let diff = weighted(members, y).sub(&total.scaled(1.0 - eps));
    diff.inner(&test_direction(n, k))
}

/// First coordinate whose margin is negative, if any.
pub fn first_rejected(members: &[SymMatrix], y: &[f64], eps: f64) -> Option<usize> {
    (0..members.len()).find(|&k| necessity_margin(members, y, eps, k) < 0.0)
}

/// Whether `(1 - eps) B <= sum_k y_k M_k` holds, by eigenvalues.
pub fn lower_bound_holds(members: &[SymMatrix], y: &[f64], eps: f64, tol: f64) -> Result<bool> {
    let total = weighted(members, &vec![1.0; members.len()]);
    let diff = weighted(members, y).sub(&total.scaled(1.0 - eps));
    Ok(eigenvalues(&diff)?[0] >= -tol)
}
