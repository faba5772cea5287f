//! Sparsifiers that also preserve edge costs, and the rainbow variant
//! that keeps every color class in proportion.

use psd_sparsify::apps::generators::gnp_graph;
use psd_sparsify::apps::{rainbow_sparsify, sparsify_with_costs};
use psd_sparsify::{Algorithm, RunOptions};

fn main() -> psd_sparsify::Result<()> {
    let g = gnp_graph(40, 0.9, 2);
    let target = 3.0;
    let opts = RunOptions::default();

    let costs: Vec<Vec<f64>> = vec![
        g.edges().iter().map(|e| (e.u + e.v) as f64).collect(),
        g.edges()
            .iter()
            .map(|e| if e.u == 0 { 5.0 } else { 0.0 })
            .collect(),
    ];
    let out = sparsify_with_costs(&g, &costs, target, Algorithm::Bss, &opts)?;
    println!(
        "{} of {} edges kept",
        out.sparsifier.support_size(),
        g.len()
    );
    for (i, c) in out.costs.iter().enumerate() {
        println!(
            "cost {i}: {:.2} -> {:.2} (ratio {:.4})",
            c.original,
            c.sparsified,
            c.ratio()
        );
    }

    let coloring: Vec<usize> = (0..g.len()).map(|k| k % 3).collect();
    let out = rainbow_sparsify(&g, &coloring, 3, target, Algorithm::Bss, &opts)?;
    for (class, c) in out.costs.iter().enumerate() {
        println!("color {class}: weight ratio {:.4}", c.ratio());
    }
    Ok(())
}
