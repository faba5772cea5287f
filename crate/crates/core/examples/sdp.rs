//! Thinning a feasible point of a covering SDP while keeping feasibility
//! and nearly the same cost.

use psd_sparsify::apps::generators::{random_psd, rng};
use psd_sparsify::apps::{sparse_sdp, SdpInstance};
use psd_sparsify::linalg::SymMatrix;
use psd_sparsify::{Algorithm, RunOptions};
use rand::Rng;

fn main() -> psd_sparsify::Result<()> {
    let mut g = rng(9);
    let m = 60;
    let a: Vec<SymMatrix> = (0..m).map(|_| random_psd(&mut g, 5, 1)).collect();
    let z: Vec<f64> = (0..m).map(|_| g.random_range(0.5..1.5)).collect();
    let c: Vec<f64> = (0..m).map(|_| g.random_range(1.0..2.0)).collect();
    let mut b = SymMatrix::zeros(5);
    for (ai, zi) in a.iter().zip(&z) {
        b.axpy(0.8 * zi, ai);
    }
    let inst = SdpInstance { a, b, c, z };
    let sol = sparse_sdp(&inst, 0.5, Algorithm::Bss, &RunOptions::default())?;
    println!(
        "nonzeros {} -> {}, cost {:.2} -> {:.2}, min eigenvalue of slack {:.3e}",
        m,
        sol.support_size(),
        sol.cost_original,
        sol.cost_sparse,
        sol.feasibility_margin
    );
    Ok(())
}
