//! Barrier-potential sparsifier on a random collection of low-rank PSD
//! matrices, with the per-step potentials it tracks.

use psd_sparsify::apps::generators::random_collection;
use psd_sparsify::bss::bss_run;
use psd_sparsify::linalg::default_rank_tol;
use psd_sparsify::{reduce_to_identity, RunLimits};

fn main() -> psd_sparsify::Result<()> {
    let coll = random_collection(7, 10, 200, 3)?;
    let reduced = reduce_to_identity(&coll, default_rank_tol(coll.dim()))?;
    let eps = 0.5;
    let run = bss_run(&reduced, eps, &RunLimits::unlimited())?;

    let p = &run.params;
    println!("n = {}, m = {}, T = {}", p.dim, coll.len(), p.rounds);
    println!(
        "u_0 = {:.3}, ell_0 = {:.3}, delta_U = {:.4}",
        p.u_0, p.ell_0, p.delta_u
    );
    for (t, it) in run.trace.iter().enumerate().step_by(40) {
        println!(
            "t = {:3}  pick {:3}  Phi^u = {:.5}  Phi_l = {:.5}  spectrum in [{:.2}, {:.2}]",
            t + 1,
            it.step.index,
            it.upper_after,
            it.lower_after,
            it.lambda_min,
            it.lambda_max
        );
    }
    let cert = &run.result.certificate;
    println!(
        "support {} of {}, ratio {:.4} (guaranteed {:.4})",
        cert.support_size,
        coll.len(),
        cert.ratio(),
        p.ratio_bound()
    );
    Ok(())
}
