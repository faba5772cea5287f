//! Approximating a convex combination of PSD matrices with few terms.

use psd_sparsify::apps::caratheodory;
use psd_sparsify::apps::generators::random_collection;
use psd_sparsify::{Algorithm, RunOptions};

fn main() -> psd_sparsify::Result<()> {
    let coll = random_collection(4, 4, 80, 2)?;
    let lambdas = vec![1.0 / 80.0; 80];
    let out = caratheodory(&lambdas, &coll, 0.5, Algorithm::Bss, &RunOptions::default())?;
    let kept = out.mu.iter().filter(|&&m| m > 0.0).count();
    println!(
        "{kept} of 80 points kept, sum of weights {}, eigenvalues in [{:.4}, {:.4}]",
        out.mu.iter().sum::<f64>(),
        out.certificate.lambda_min,
        out.certificate.lambda_max
    );
    Ok(())
}
