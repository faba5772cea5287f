//! Width-free multiplicative weights, checking on every round that the
//! multiplicative and shifted-barrier forms of the potential agree, and
//! that the exponent scale does not change the picks.

use psd_sparsify::apps::generators::random_collection;
use psd_sparsify::linalg::default_rank_tol;
use psd_sparsify::reduce_to_identity;
use psd_sparsify::width_free::{wf_run, WfOptions};

fn main() -> psd_sparsify::Result<()> {
    let coll = random_collection(3, 6, 60, 2)?;
    let reduced = reduce_to_identity(&coll, default_rank_tol(coll.dim()))?;
    let eps = 0.5;
    let options = WfOptions {
        check_equivalence: true,
        ..Default::default()
    };
    let run = wf_run(&reduced, eps, &options)?;
    let p = &run.params;
    println!(
        "T = {}, gamma = {:.5}, delta_U = {:.5}, delta_L = {:.5}",
        p.rounds, p.gamma, p.delta_u, p.delta_l
    );

    let grow = run
        .trace
        .iter()
        .map(|it| it.log_upper_after - it.log_upper_before)
        .fold(f64::MIN, f64::max);
    println!(
        "largest upper growth {:.3e} vs ln(1 + delta_U) = {:.3e}",
        grow,
        p.upper_shift()
    );
    let agreed = run
        .trace
        .iter()
        .filter(|it| it.equivalence.is_some())
        .count();
    println!(
        "potential forms agreed on {agreed} of {} rounds",
        run.trace.len()
    );

    let cert = &run.result.certificate;
    println!(
        "support {}, eigenvalues in [{:.4}, {:.4}]",
        cert.support_size, cert.lambda_min, cert.lambda_max
    );

    let scaled = wf_run(
        &reduced,
        eps,
        &WfOptions {
            gamma: Some(10.0 * p.gamma),
            ..Default::default()
        },
    )?;
    println!(
        "same picks with 10x gamma: {}",
        scaled.indices() == run.indices()
    );
    Ok(())
}
