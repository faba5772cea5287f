//! Two-block multiplicative weights with a width-bounded oracle.

use psd_sparsify::apps::generators::random_collection;
use psd_sparsify::block::block_run;
use psd_sparsify::linalg::default_rank_tol;
use psd_sparsify::{reduce_to_identity, RunLimits};

fn main() -> psd_sparsify::Result<()> {
    let coll = random_collection(11, 4, 24, 2)?;
    let reduced = reduce_to_identity(&coll, default_rank_tol(coll.dim()))?;
    let eps = 0.5;
    let run = block_run(&reduced, eps, &RunLimits::unlimited())?;
    let p = &run.params;
    println!(
        "beta = {}, eta = {}, rho = {:.1}, T = {}, error bound {:.4} <= {eps}",
        p.beta,
        p.eta,
        p.rho,
        p.rounds,
        p.error_bound()
    );
    let widest = run
        .trace
        .iter()
        .map(|it| it.choice.width)
        .fold(0.0, f64::max);
    println!("widest oracle answer {widest:.2} (limit {:.1})", p.rho);
    let cert = &run.result.certificate;
    println!(
        "support {}, eigenvalues in [{:.4}, {:.4}]",
        cert.support_size, cert.lambda_min, cert.lambda_max
    );
    Ok(())
}
