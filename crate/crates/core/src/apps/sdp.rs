//! Thinning a feasible point of a covering SDP.
//!
//! Given `sum_i z_i A_i >= B` with `A_i` PSD and `z >= 0`, the blocks
//! `diag(z_i A_i, c_i z_i)` sparsify to a point `zbar_i = y_i z_i` with few
//! nonzeros, `sum_i zbar_i A_i >= sum_i z_i A_i >= B` and
//! `c . zbar <= (1 + eps) c . z`.

use crate::algorithm::{sparsify_to_ratio, Algorithm, RunOptions};
use crate::collection::{PsdCollection, SandwichCertificate};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, is_psd, SymMatrix, DEFAULT_PSD_TOL};

#[derive(Clone, Debug)]
pub struct SdpInstance {
    pub a: Vec<SymMatrix>,
    pub b: SymMatrix,
    pub c: Vec<f64>,
    pub z: Vec<f64>,
}

impl SdpInstance {
    /// Checks shapes, signs, PSD-ness of each `A_i` and feasibility of `z`.
    pub fn validate(&self, psd_tol: f64) -> Result<()> {
        let m = self.a.len();
        if m == 0 {
            return Err(Error::EmptyProblem);
        }
        if self.c.len() != m || self.z.len() != m {
            return Err(Error::InfeasibleInput(format!(
                "{m} constraint matrices but {} costs and {} coordinates",
                self.c.len(),
                self.z.len()
            )));
        }
        let n = self.b.dim();
        for (i, a) in self.a.iter().enumerate() {
            if a.dim() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    found: a.dim(),
                });
            }
            if !is_psd(a, psd_tol)? {
                return Err(Error::InfeasibleInput(format!("A_{i} is not PSD")));
            }
        }
        if let Some(i) = self.c.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InfeasibleInput(format!("cost {i} is {}", self.c[i])));
        }
        if let Some(i) = self.z.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InfeasibleInput(format!("z_{i} is {}", self.z[i])));
        }
        let slack = self.covering(&self.z).sub(&self.b);
        if !is_psd(&slack, psd_tol)? {
            return Err(Error::InfeasibleInput(format!(
                "sum z_i A_i - B has eigenvalue {:e}",
                eigenvalues(&slack)?[0]
            )));
        }
        Ok(())
    }

    /// `sum_i x_i A_i`.
    pub fn covering(&self, x: &[f64]) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.b.dim());
        for (a, &v) in self.a.iter().zip(x) {
            if v != 0.0 {
                acc.axpy(v, a);
            }
        }
        acc
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Blocks `diag(z_i A_i, c_i z_i)`.
    pub fn block_collection(&self) -> Result<PsdCollection> {
        let blocks = self
            .a
            .iter()
            .zip(&self.c)
            .zip(&self.z)
            .map(|((a, &c), &z)| {
                SymMatrix::direct_sum(&[&a.scaled(z), &SymMatrix::from_diagonal(&[c * z])])
            })
            .collect();
        PsdCollection::from_matrices(blocks)
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub z: Vec<f64>,
    pub certificate: SandwichCertificate,
    pub cost_original: f64,
    pub cost_sparse: f64,
    /// `lambda_min(sum_i zbar_i A_i - B)`.
    pub feasibility_margin: f64,
}

impl SdpSolution {
    pub fn support_size(&self) -> usize {
        crate::support_size(&self.z)
    }
}

pub fn sparse_sdp(
    instance: &SdpInstance,
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<SdpSolution> {
    instance.validate(DEFAULT_PSD_TOL)?;
    let coll = instance.block_collection()?;
    let out = sparsify_to_ratio(&coll, algorithm, target, options)?.result;
    let z: Vec<f64> = instance.z.iter().zip(&out.y).map(|(z, y)| z * y).collect();
    let margin = eigenvalues(&instance.covering(&z).sub(&instance.b))?[0];
    Ok(SdpSolution {
        cost_original: instance.cost(&instance.z),
        cost_sparse: instance.cost(&z),
        feasibility_margin: margin,
        certificate: out.certificate,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_identity_constraint() {
        let inst = SdpInstance {
            a: vec![SymMatrix::identity(2)],
            b: SymMatrix::identity(2),
            c: vec![1.0],
            z: vec![1.0],
        };
        let sol = sparse_sdp(&inst, 0.5, Algorithm::Bss, &RunOptions::default()).unwrap();
        assert!(sol.z[0] >= 1.0 - 1e-12 && sol.z[0] <= 1.5);
        assert!(sol.feasibility_margin >= -1e-9);
    }

    #[test]
    fn zero_cost_still_feasible() {
        let inst = SdpInstance {
            a: vec![
                SymMatrix::from_diagonal(&[1.0, 0.0]),
                SymMatrix::from_diagonal(&[0.0, 1.0]),
                SymMatrix::identity(2),
            ],
            b: SymMatrix::from_diagonal(&[0.5, 0.5]),
            c: vec![0.0; 3],
            z: vec![1.0, 1.0, 1.0],
        };
        let sol = sparse_sdp(&inst, 0.5, Algorithm::Bss, &RunOptions::default()).unwrap();
        assert_eq!(sol.cost_sparse, 0.0);
        assert!(sol.feasibility_margin >= -1e-9);
    }

    #[test]
    fn infeasible_point_rejected() {
        let inst = SdpInstance {
            a: vec![SymMatrix::identity(2)],
            b: SymMatrix::scaled_identity(2, 2.0),
            c: vec![1.0],
            z: vec![1.0],
        };
        assert!(matches!(
            inst.validate(1e-9),
            Err(Error::InfeasibleInput(_))
        ));
    }
}
