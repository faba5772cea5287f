//! Dense symmetric linear algebra.
//!
//! [`SymMatrix`] keeps a single packed copy of the upper triangle, so
//! symmetry holds by construction. Spectral work is delegated to
//! `nalgebra`'s symmetric eigensolver and every matrix function
//! (exponential, inverse powers, pseudo-inverse square root) is evaluated
//! through the eigendecomposition.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Default tolerance for positive semidefiniteness checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Largest eigenvalue accepted by [`sym_exp`] before reporting overflow.
pub const EXP_LIMIT: f64 = 700.0;

/// Default relative rank cutoff for an `n`-dimensional problem.
pub fn default_rank_tol(n: usize) -> f64 {
    1e-10 * n as f64
}

/// Dense real symmetric matrix stored as its packed upper triangle
/// (row-major, `i <= j`).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl SymMatrix {
    /// The `n x n` zero matrix. Panics if `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        SymMatrix {
            dim: n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, value: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, value);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds a matrix from `f(i, j)`, evaluated on the upper triangle only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                m.upper[k] = f(i, j);
                k += 1;
            }
        }
        m
    }

    /// Takes the upper triangle of a square dense matrix.
    pub fn from_dense_upper(dense: &DMatrix<f64>) -> Self {
        assert_eq!(dense.nrows(), dense.ncols(), "matrix must be square");
        Self::from_fn(dense.nrows(), |i, j| dense[(i, j)])
    }

    /// Builds `scale * v v^T`.
    pub fn outer(v: &[f64], scale: f64) -> Self {
        Self::from_fn(v.len(), |i, j| scale * v[i] * v[j])
    }

    /// Block-diagonal direct sum of the given matrices.
    pub fn direct_sum(blocks: &[&SymMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zeros(n);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in i..b.dim {
                    m.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.dim;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // row i starts after sum_{r<i} (n - r) entries
        i * (2 * self.dim - i + 1) / 2 + (j - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.upper[k] = value;
    }

    /// Adds `value` at `(i, j)`; on the diagonal this is a single addition.
    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.upper[k] += value;
    }

    /// The packed upper triangle, row-major.
    pub fn packed(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SymMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.upper.iter_mut().zip(&other.upper) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.add_at(i, i, shift);
        }
        out
    }

    /// Trace inner product `<self, other> = sum_ij self_ij other_ij`,
    /// accumulated over the packed upper triangle in a fixed order.
    /// Panics on dimension mismatch; see [`trace_inner`] for the checked form.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut diag = 0.0;
        let mut off = 0.0;
        let mut k = 0;
        for i in 0..n {
            diag += self.upper[k] * other.upper[k];
            k += 1;
            for _ in (i + 1)..n {
                off += self.upper[k] * other.upper[k];
                k += 1;
            }
        }
        diag + 2.0 * off
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// `x^T self x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.get(i, i) * x[i] * x[i];
            for j in (i + 1)..n {
                acc += 2.0 * self.get(i, j) * x[i] * x[j];
            }
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Congruence `W^T self W` for an `n x k` matrix `W`.
    pub fn congruence(&self, w: &DMatrix<f64>) -> SymMatrix {
        assert_eq!(w.nrows(), self.dim, "dimension mismatch");
        let product = self.to_dense() * w;
        let k = w.ncols();
        SymMatrix::from_fn(k, |i, j| w.column(i).dot(&product.column(j)))
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn principal(&self, indices: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b]))
    }
}

/// Eigendecomposition `M = Q diag(eigenvalues) Q^T` with eigenvalues
/// ascending and orthonormal eigenvectors in the columns of `Q`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `Q diag(f(lambda)) Q^T`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.compose(&values)
    }

    /// `Q diag(values) Q^T` for caller-supplied eigenvalue images.
    pub fn compose(&self, values: &[f64]) -> SymMatrix {
        let n = self.dim();
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (k, v) in values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*v);
        }
        let full = &scaled * q.transpose();
        SymMatrix::from_fn(n, |i, j| 0.5 * (full[(i, j)] + full[(j, i)]))
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.compose(&self.eigenvalues)
    }
}

/// Symmetric eigendecomposition, eigenvalues ascending.
pub fn eigh(m: &SymMatrix) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let n = m.dim();
    let eig = SymmetricEigen::new(m.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let mut values: Vec<f64> = m
        .to_dense()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn psd_from_values(values: &[f64], tol: f64) -> bool {
    let lo = values[0];
    let radius = lo.abs().max(values[values.len() - 1].abs());
    lo >= -tol * radius.max(1.0)
}

/// True iff `lambda_min(M) >= -tol * max(1, spectral radius of M)`.
pub fn is_psd(m: &SymMatrix, tol: f64) -> Result<bool> {
    Ok(psd_from_values(&eigenvalues(m)?, tol))
}

/// Pseudo-inverse square root `(M^+)^{1/2}`. Eigenvalues at or below
/// `rank_tol * lambda_max` are treated as zero. Returns the matrix and the
/// number of retained eigenvalues.
pub fn pinv_sqrt(m: &SymMatrix, rank_tol: f64) -> Result<(SymMatrix, usize)> {
    let spec = eigh(m)?;
    if !psd_from_values(&spec.eigenvalues, rank_tol) {
        return Err(Error::NotPsd {
            min_eigenvalue: spec.min(),
        });
    }
    let cutoff = rank_tol * spec.max().max(0.0);
    let mut rank = 0;
    let values: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| {
            if l > cutoff && l > 0.0 {
                rank += 1;
                1.0 / l.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok((spec.compose(&values), rank))
}

/// Matrix exponential through the eigendecomposition.
pub fn sym_exp(m: &SymMatrix) -> Result<SymMatrix> {
    let spec = eigh(m)?;
    if spec.max() > EXP_LIMIT {
        return Err(Error::ExpOverflow {
            exponent: spec.max(),
        });
    }
    Ok(spec.map(f64::exp))
}

/// `ln trace exp(M)`, evaluated with the largest eigenvalue factored out so
/// it never overflows.
pub fn log_trace_exp(m: &SymMatrix) -> Result<f64> {
    let values = eigenvalues(m)?;
    Ok(log_sum_exp(&values))
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// `exp(M) / trace exp(M)`, computed with a shift so it never overflows.
pub fn normalized_exp(m: &SymMatrix) -> Result<SymMatrix> {
    let spec = eigh(m)?;
    let top = spec.max();
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let values: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Ok(spec.compose(&values))
}

/// Checked trace inner product.
pub fn trace_inner(x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x.inner(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn packed_layout_round_trips() {
        let m = SymMatrix::from_fn(4, |i, j| (10 * i + j) as f64);
        for i in 0..4 {
            for j in i..4 {
                assert_eq!(m.get(i, j), (10 * i + j) as f64);
                assert_eq!(m.get(j, i), (10 * i + j) as f64);
            }
        }
        assert_eq!(m.packed().len(), 10);
    }

    #[test]
    fn eigh_diagonal() {
        let spec = eigh(&SymMatrix::from_diagonal(&[2.0, 1.0])).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.eigenvalues[1], 2.0, epsilon = 1e-14);
        // eigenvector for 1 is e_2, for 2 is e_1
        assert_abs_diff_eq!(spec.eigenvectors[(1, 0)].abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.eigenvectors[(0, 1)].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_zero_and_swap() {
        let spec = eigh(&SymMatrix::zeros(3)).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.0, 0.0, 0.0]);
        // x^2 - 1 = 0
        let swap = SymMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let spec = eigh(&swap).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_rejects_nan() {
        let mut m = SymMatrix::zeros(2);
        m.set(0, 1, f64::NAN);
        assert_eq!(eigh(&m).unwrap_err(), Error::InvalidMatrix);
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&SymMatrix::identity(3), 0.0).unwrap());
        assert!(!is_psd(&SymMatrix::from_diagonal(&[1.0, -1.0]), 1e-12).unwrap());
        let edge = SymMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { -1.0 });
        // eigenvalues 0 and 2; the computed zero may carry rounding of either sign
        assert!(is_psd(&edge, 1e-15).unwrap());
    }

    #[test]
    fn pinv_sqrt_cases() {
        let (r, rank) = pinv_sqrt(&SymMatrix::from_diagonal(&[4.0, 0.0]), 1e-10).unwrap();
        assert_eq!(rank, 1);
        assert_abs_diff_eq!(r.get(0, 0), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.get(1, 1), 0.0, epsilon = 1e-14);

        let (r, rank) = pinv_sqrt(&SymMatrix::identity(3), 1e-10).unwrap();
        assert_eq!(rank, 3);
        assert_abs_diff_eq!(
            r.sub(&SymMatrix::identity(3)).frobenius_norm(),
            0.0,
            epsilon = 1e-14
        );

        // [[2,1],[1,2]] = 1 on (1,-1)/sqrt2, 3 on (1,1)/sqrt2
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let (r, rank) = pinv_sqrt(&m, 1e-10).unwrap();
        assert_eq!(rank, 2);
        let a = 1.0;
        let b = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r.get(0, 0), 0.5 * (a + b), epsilon = 1e-14);
        assert_abs_diff_eq!(r.get(0, 1), 0.5 * (b - a), epsilon = 1e-14);

        let bad = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(pinv_sqrt(&bad, 1e-10), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn exp_cases() {
        let e = sym_exp(&SymMatrix::zeros(2)).unwrap();
        assert_abs_diff_eq!(
            e.sub(&SymMatrix::identity(2)).frobenius_norm(),
            0.0,
            epsilon = 1e-15
        );
        let e = sym_exp(&SymMatrix::from_diagonal(&[1.0])).unwrap();
        assert_abs_diff_eq!(e.get(0, 0), std::f64::consts::E, epsilon = 1e-15);
        let e = sym_exp(&SymMatrix::from_diagonal(&[2f64.ln(), 3f64.ln()])).unwrap();
        assert_abs_diff_eq!(e.get(0, 0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.get(1, 1), 3.0, epsilon = 1e-14);
        assert!(matches!(
            sym_exp(&SymMatrix::from_diagonal(&[701.0])),
            Err(Error::ExpOverflow { .. })
        ));
        // the log-space form survives what sym_exp refuses
        let lte = log_trace_exp(&SymMatrix::from_diagonal(&[1000.0, 1000.0])).unwrap();
        assert_abs_diff_eq!(lte, 1000.0 + 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn inner_products() {
        let i3 = SymMatrix::identity(3);
        assert_eq!(trace_inner(&i3, &i3).unwrap(), 3.0);
        let x = SymMatrix::from_diagonal(&[1.0, 2.0]);
        let y = SymMatrix::from_diagonal(&[3.0, 4.0]);
        assert_eq!(trace_inner(&x, &y).unwrap(), 11.0);
        assert_eq!(trace_inner(&x, &SymMatrix::zeros(2)).unwrap(), 0.0);
        assert!(matches!(
            trace_inner(&x, &i3),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn direct_sum_and_congruence() {
        let a = SymMatrix::from_diagonal(&[1.0, 2.0]);
        let b = SymMatrix::from_diagonal(&[3.0]);
        let s = SymMatrix::direct_sum(&[&a, &b]);
        assert_eq!(s.diagonal(), vec![1.0, 2.0, 3.0]);
        let w = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 1.0]);
        assert_eq!(s.congruence(&w).get(0, 0), 5.0);
    }
}
