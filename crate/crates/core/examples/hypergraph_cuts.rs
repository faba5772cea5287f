//! Hypergraph sparsification through the clique expansion, checked on
//! every cut.

use psd_sparsify::apps::generators::uniform_hypergraph;
use psd_sparsify::apps::{cut_sparsifier_report, sparsify_hypergraph};
use psd_sparsify::{Algorithm, RunOptions};

fn main() -> psd_sparsify::Result<()> {
    let target = 0.5;
    for r in [3, 4] {
        let h = uniform_hypergraph(9, r, 40, 5);
        let s = sparsify_hypergraph(&h, target, Algorithm::Bss, &RunOptions::default())?;
        let report = cut_sparsifier_report(&h, &s.hypergraph, target, 1e-6)?;
        println!(
            "{r}-uniform: {} of {} hyperedges kept, {} cuts, star ratio [{:.3}, {:.3}], weight ratio [{:.3}, {:.3}], ok = {}",
            s.hypergraph.len(),
            h.len(),
            report.cuts_checked,
            report.star_ratio_min,
            report.star_ratio_max,
            report.weight_ratio_min,
            report.weight_ratio_max,
            report.passed()
        );
    }
    Ok(())
}
