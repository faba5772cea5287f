//! Why the members have to be PSD: with the off-diagonal pairs `E_ij`,
//! no coordinate of the all-ones weighting can be dropped.

use psd_sparsify::apps::necessity::{first_rejected, lower_bound_holds, psd_counterexample};

fn main() -> psd_sparsify::Result<()> {
    let eps = 0.5;
    for n in 2..=5 {
        let members = psd_counterexample(n)?;
        let rejected = (0..members.len())
            .filter(|&k| {
                let mut y = vec![1.0; members.len()];
                y[k] = 0.0;
                first_rejected(&members, &y, eps).is_some()
            })
            .count();
        println!(
            "n = {n}: {rejected} of {} single-coordinate drops rejected",
            members.len()
        );
    }
    let members = psd_counterexample(2)?;
    println!(
        "n = 2, y = (1.5, 0): lower bound alone holds = {}",
        lower_bound_holds(&members, &[1.5, 0.0], eps, 1e-12)?
    );
    Ok(())
}
