//! Spectral sparsification of a dense graph, then random cuts compared
//! against the original.

use psd_sparsify::apps::generators::{complete_graph, rng};
use psd_sparsify::apps::sparsify_graph;
use psd_sparsify::{Algorithm, RunOptions};
use rand::Rng;

fn main() -> psd_sparsify::Result<()> {
    let g = complete_graph(40);
    let target = 3.0;
    let s = sparsify_graph(&g, target, Algorithm::Bss, &RunOptions::default())?;
    let mut r = rng(1);
    let mut worst: (f64, f64) = (f64::INFINITY, 0.0);
    for _ in 0..2000 {
        let side: Vec<bool> = (0..g.n()).map(|_| r.random_bool(0.5)).collect();
        if side.iter().all(|&b| b) || !side.iter().any(|&b| b) {
            continue;
        }
        let ratio = s.graph.cut(&side) / g.cut(&side);
        worst = (worst.0.min(ratio), worst.1.max(ratio));
    }
    println!(
        "{} of {} edges, cut ratios in [{:.3}, {:.3}], target window [1, {}]",
        s.support_size(),
        g.len(),
        worst.0,
        worst.1,
        1.0 + target
    );
    Ok(())
}
