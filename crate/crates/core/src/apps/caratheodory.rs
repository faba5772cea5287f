//! Approximate Carathéodory for PSD matrices: replace a convex combination
//! `B = sum_i lambda_i B_i` by one with few nonzeros that stays within
//! `[(1 - eps) B, (1 + eps) B]`.

use crate::algorithm::{sparsify_to_ratio, Algorithm, RunOptions};
use crate::collection::{PsdCollection, SandwichCertificate};
use crate::error::{Error, Result};
use crate::linalg::{default_rank_tol, SymMatrix};

#[derive(Clone, Debug)]
pub struct CaratheodoryResult {
    /// New point on the simplex.
    pub mu: Vec<f64>,
    /// Whitened spectrum of `sum_i mu_i B_i` against `B`.
    pub certificate: SandwichCertificate,
}

fn check_simplex(lambdas: &[f64], m: usize) -> Result<()> {
    if lambdas.len() != m {
        return Err(Error::InvalidSimplexPoint(format!(
            "{} coordinates for {m} matrices",
            lambdas.len()
        )));
    }
    if let Some(i) = lambdas.iter().position(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::InvalidSimplexPoint(format!(
            "coordinate {i} is {}",
            lambdas[i]
        )));
    }
    let total: f64 = lambdas.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSimplexPoint(format!(
            "coordinates sum to {total}"
        )));
    }
    Ok(())
}

/// Blocks `diag(lambda_i B_i, lambda_i)`.
pub fn lifted_collection(lambdas: &[f64], collection: &PsdCollection) -> Result<PsdCollection> {
    check_simplex(lambdas, collection.len())?;
    let blocks = collection
        .matrices()
        .iter()
        .zip(lambdas)
        .map(|(b, &l)| SymMatrix::direct_sum(&[&b.scaled(l), &SymMatrix::from_diagonal(&[l])]))
        .collect();
    PsdCollection::from_matrices(blocks)
}

/// Sparsifies the lifted blocks and renormalizes
/// `mu_i = y_i lambda_i / sum_j y_j lambda_j`.
pub fn caratheodory(
    lambdas: &[f64],
    collection: &PsdCollection,
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<CaratheodoryResult> {
    let lifted = lifted_collection(lambdas, collection)?;
    let y = sparsify_to_ratio(&lifted, algorithm, target, options)?
        .result
        .y;

    let mass: f64 = y.iter().zip(lambdas).map(|(y, l)| y * l).sum();
    let mut mu: Vec<f64> = y.iter().zip(lambdas).map(|(y, l)| y * l / mass).collect();
    // the last nonzero entry absorbs the rounding residue; with only zeros
    // after it, the index-order sum is then exactly one
    if let Some(last) = mu.iter().rposition(|&v| v > 0.0) {
        let before: f64 = mu[..last].iter().sum();
        mu[last] = (1.0 - before).max(0.0);
    }

    let scaled: Vec<SymMatrix> = collection
        .matrices()
        .iter()
        .zip(lambdas)
        .map(|(b, &l)| b.scaled(l))
        .collect();
    let weights: Vec<f64> = mu
        .iter()
        .zip(lambdas)
        .map(|(m, &l)| if l > 0.0 { m / l } else { 0.0 })
        .collect();
    let coll = PsdCollection::from_matrices(scaled)?;
    let reduced = crate::reduce_to_identity(&coll, default_rank_tol(coll.dim()))?;
    Ok(CaratheodoryResult {
        certificate: reduced.certificate(&weights)?,
        mu,
    })
}
