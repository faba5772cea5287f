//! Importance sampling by trace, then the same distribution derandomized
//! with pessimistic estimators.

use psd_sparsify::linalg::SymMatrix;
use psd_sparsify::sampling::{aw_sample, pe_run_adaptive, Method, SamplingPlan};
use psd_sparsify::{ReducedInstance, RunLimits};

fn main() -> psd_sparsify::Result<()> {
    let r = 10;
    let members = (0..r)
        .map(|i| {
            let mut d = vec![0.0; r];
            d[i] = 1.0;
            SymMatrix::from_diagonal(&d)
        })
        .collect();
    let reduced = ReducedInstance::from_isotropic(members)?;
    let eps = 0.5;

    let plan = SamplingPlan::new(&reduced, eps, Method::Random)?;
    let hits = (0..100)
        .filter(|&seed| {
            aw_sample(&reduced, eps, seed)
                .map(|out| out.certificate.within(1.0 - eps, 1.0 + eps))
                .unwrap_or(false)
        })
        .count();
    println!(
        "random: T = {}, {hits}/100 seeds inside [1 - eps, 1 + eps]",
        plan.rounds
    );

    let run = pe_run_adaptive(&reduced, eps, &RunLimits::unlimited())?;
    let last = run.steps.last().map_or(run.initial, |s| s.after);
    println!(
        "derandomized: T = {}, phi + psi from {:.4} down to {:.4}",
        run.result.rounds, run.initial, last
    );
    let cert = &run.result.certificate;
    println!(
        "eigenvalues in [{:.4}, {:.4}]",
        cert.lambda_min, cert.lambda_max
    );
    Ok(())
}
