//! Collections of PSD matrices, the reduction to `sum_i C_i = I`, and
//! spectral certificates for reweighted sums.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{default_rank_tol, eigenvalues, eigh, is_psd, SymMatrix, DEFAULT_PSD_TOL};

/// Sparse rank-one term `scale * v v^T` with `v` given by its nonzeros.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOne {
    pub scale: f64,
    pub entries: Vec<(usize, f64)>,
}

impl RankOne {
    /// `scale * (e_u - e_v)(e_u - e_v)^T`.
    pub fn edge(u: usize, v: usize, scale: f64) -> Self {
        RankOne {
            scale,
            entries: vec![(u, 1.0), (v, -1.0)],
        }
    }

    pub fn add_to(&self, m: &mut SymMatrix) {
        for (a, &(i, x)) in self.entries.iter().enumerate() {
            for &(j, y) in &self.entries[a..] {
                m.add_at(i, j, self.scale * x * y);
            }
        }
    }
}

/// Ordered list of PSD matrices `B_1, ..., B_m` of a common dimension.
#[derive(Clone, Debug)]
pub struct PsdCollection {
    dim: usize,
    matrices: Vec<SymMatrix>,
    factors: Option<Vec<Vec<RankOne>>>,
}

impl PsdCollection {
    /// Validates dimensions and checks every member with [`is_psd`] at `psd_tol`.
    pub fn new(matrices: Vec<SymMatrix>, psd_tol: f64) -> Result<Self> {
        let dim = matrices
            .first()
            .map(SymMatrix::dim)
            .ok_or(Error::EmptyProblem)?;
        for m in &matrices {
            if m.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            if !is_psd(m, psd_tol)? {
                return Err(Error::NotPsd {
                    min_eigenvalue: eigenvalues(m)?[0],
                });
            }
        }
        Ok(PsdCollection {
            dim,
            matrices,
            factors: None,
        })
    }

    /// Same as [`PsdCollection::new`] with the default tolerance.
    pub fn from_matrices(matrices: Vec<SymMatrix>) -> Result<Self> {
        Self::new(matrices, DEFAULT_PSD_TOL)
    }

    /// Builds each member as a sum of rank-one terms with nonnegative
    /// scales; the terms are kept alongside the dense matrices.
    pub fn from_factors(dim: usize, factors: Vec<Vec<RankOne>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyProblem);
        }
        let mut matrices = Vec::with_capacity(factors.len());
        for terms in &factors {
            let mut m = SymMatrix::zeros(dim);
            for t in terms {
                if t.scale < 0.0 || !t.scale.is_finite() {
                    return Err(Error::NotPsd {
                        min_eigenvalue: t.scale,
                    });
                }
                if let Some(&(i, _)) = t.entries.iter().find(|(i, _)| *i >= dim) {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        found: i + 1,
                    });
                }
                t.add_to(&mut m);
            }
            matrices.push(m);
        }
        Ok(PsdCollection {
            dim,
            matrices,
            factors: Some(factors),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[SymMatrix] {
        &self.matrices
    }

    pub fn get(&self, i: usize) -> &SymMatrix {
        &self.matrices[i]
    }

    pub fn factors(&self) -> Option<&[Vec<RankOne>]> {
        self.factors.as_deref()
    }

    /// `B = sum_i B_i`.
    pub fn sum(&self) -> SymMatrix {
        self.weighted_sum_unchecked(None)
    }

    /// `sum_i y_i B_i`.
    pub fn weighted_sum(&self, y: &[f64]) -> Result<SymMatrix> {
        check_weights(y, self.len())?;
        Ok(self.weighted_sum_unchecked(Some(y)))
    }

    fn weighted_sum_unchecked(&self, y: Option<&[f64]>) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.dim);
        for (i, m) in self.matrices.iter().enumerate() {
            let w = y.map_or(1.0, |y| y[i]);
            if w != 0.0 {
                acc.axpy(w, m);
            }
        }
        acc
    }
}

fn check_weights(y: &[f64], m: usize) -> Result<()> {
    if y.len() != m {
        return Err(Error::WeightLength {
            expected: m,
            found: y.len(),
        });
    }
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeWeight { index, value });
    }
    Ok(())
}

/// A collection whitened against its sum: `C_i = W^T B_i W` with
/// `W = (B^+)^{1/2} P`, where the columns of `P` span `range(B)`.
/// The members satisfy `sum_i C_i = I_r`.
#[derive(Clone, Debug)]
pub struct ReducedInstance {
    rank: usize,
    original_dim: usize,
    members: Vec<SymMatrix>,
    traces: Vec<f64>,
    basis: DMatrix<f64>,
    whitener: DMatrix<f64>,
}

impl ReducedInstance {
    /// Reduces a collection given as plain matrices with the default rank
    /// tolerance. Handy when the members already sum to the identity.
    pub fn from_isotropic(members: Vec<SymMatrix>) -> Result<Self> {
        let coll = PsdCollection::from_matrices(members)?;
        reduce_to_identity(&coll, default_rank_tol(coll.dim()))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn original_dim(&self) -> usize {
        self.original_dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SymMatrix] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &SymMatrix {
        &self.members[i]
    }

    /// `trace C_i`, cached.
    pub fn trace(&self, i: usize) -> f64 {
        self.traces[i]
    }

    pub fn traces(&self) -> &[f64] {
        &self.traces
    }

    /// `n x r` orthonormal basis of `range(B)`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `n x r` whitening map `(B^+)^{1/2} P`.
    pub fn whitener(&self) -> &DMatrix<f64> {
        &self.whitener
    }

    /// Whitens an `n x n` matrix into the `r x r` reduced space.
    pub fn whiten(&self, m: &SymMatrix) -> SymMatrix {
        m.congruence(&self.whitener)
    }

    /// `sum_i y_i C_i`.
    pub fn combine(&self, y: &[f64]) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.rank);
        for (c, &w) in self.members.iter().zip(y) {
            if w != 0.0 {
                acc.axpy(w, c);
            }
        }
        acc
    }

    /// Spectral certificate of `sum_i y_i C_i`.
    pub fn certificate(&self, y: &[f64]) -> Result<SandwichCertificate> {
        check_weights(y, self.len())?;
        SandwichCertificate::from_matrix(&self.combine(y), y)
    }
}

/// Reduces `B_1, ..., B_m` to matrices summing to `I_r` on `range(B)`.
pub fn reduce_to_identity(coll: &PsdCollection, rank_tol: f64) -> Result<ReducedInstance> {
    let n = coll.dim();
    let total = coll.sum();
    let spec = eigh(&total)?;
    let top = spec.max();
    if !(top > 0.0) {
        return Err(Error::EmptyProblem);
    }
    let cutoff = rank_tol * top;
    let kept: Vec<usize> = (0..n).filter(|&k| spec.eigenvalues[k] > cutoff).collect();
    let rank = kept.len();
    let basis = DMatrix::from_fn(n, rank, |i, c| spec.eigenvectors[(i, kept[c])]);
    let whitener = DMatrix::from_fn(n, rank, |i, c| {
        spec.eigenvectors[(i, kept[c])] / spec.eigenvalues[kept[c]].sqrt()
    });

    // (I - P P^T) B_i (I - P P^T) must vanish
    let projector = DMatrix::<f64>::identity(n, n) - &basis * basis.transpose();
    let mut members = Vec::with_capacity(coll.len());
    for (index, b) in coll.matrices().iter().enumerate() {
        let dense = b.to_dense();
        let residual = (&projector * &dense * &projector).norm();
        if residual > 1e-8 * dense.norm().max(1.0) {
            return Err(Error::RangeMismatch { index, residual });
        }
        members.push(b.congruence(&whitener));
    }
    let traces = members.iter().map(SymMatrix::trace).collect();
    Ok(ReducedInstance {
        rank,
        original_dim: n,
        members,
        traces,
        basis,
        whitener,
    })
}

/// Extreme eigenvalues of a whitened reweighted sum.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichCertificate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub support_size: usize,
    pub epsilon_achieved: f64,
}

impl SandwichCertificate {
    pub fn from_matrix(whitened_sum: &SymMatrix, y: &[f64]) -> Result<Self> {
        let values = eigenvalues(whitened_sum)?;
        let lambda_min = values[0];
        let lambda_max = values[values.len() - 1];
        Ok(SandwichCertificate {
            lambda_min,
            lambda_max,
            support_size: support_size(y),
            epsilon_achieved: lambda_max / lambda_min - 1.0,
        })
    }

    /// `lambda_max / lambda_min`.
    pub fn ratio(&self) -> f64 {
        self.lambda_max / self.lambda_min
    }

    /// `lambda_min >= 1 - tol` and `lambda_max <= (1 + eps)(1 + tol)`.
    pub fn passes(&self, eps: f64, tol: f64) -> bool {
        self.lambda_min >= 1.0 - tol && self.lambda_max <= (1.0 + eps) * (1.0 + tol)
    }

    /// Both extreme eigenvalues inside `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.lambda_min >= lo && self.lambda_max <= hi
    }
}

pub fn support_size(y: &[f64]) -> usize {
    y.iter().filter(|&&v| v > 0.0).count()
}

/// Outcome of [`verify_sandwich`].
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichVerdict {
    pub certificate: SandwichCertificate,
    pub passed: bool,
}

/// Whitens `sum_i y_i B_i` against `B` on `range(B)` and checks
/// `B <= sum_i y_i B_i <= (1 + eps) B` up to `tol`.
pub fn verify_sandwich(
    coll: &PsdCollection,
    y: &[f64],
    eps: f64,
    tol: f64,
) -> Result<SandwichVerdict> {
    check_weights(y, coll.len())?;
    let reduced = reduce_to_identity(coll, default_rank_tol(coll.dim()))?;
    let certificate = reduced.certificate(y)?;
    let passed = certificate.passes(eps, tol);
    Ok(SandwichVerdict {
        certificate,
        passed,
    })
}

/// Weights produced by one of the sparsifiers.
#[derive(Clone, Debug)]
pub struct SparsifierResult {
    pub y: Vec<f64>,
    pub certificate: SandwichCertificate,
    /// Number of iterations (or samples) the algorithm ran.
    pub rounds: usize,
}

impl SparsifierResult {
    pub fn new(reduced: &ReducedInstance, y: Vec<f64>, rounds: usize) -> Result<Self> {
        let certificate = reduced.certificate(&y)?;
        Ok(SparsifierResult {
            y,
            certificate,
            rounds,
        })
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i] > 0.0).collect()
    }

    /// Rescales `y` by `1 / lambda_min` so the lower side of the sandwich
    /// is exactly `B`; the ratio is unchanged.
    pub fn normalized(&self, reduced: &ReducedInstance) -> Result<Self> {
        let scale = 1.0 / self.certificate.lambda_min;
        let y = self.y.iter().map(|v| v * scale).collect();
        Self::new(reduced, y, self.rounds)
    }
}
