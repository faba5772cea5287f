//! One reweighting that sparsifies a graph and each of several of its
//! subgraphs at once.

use psd_sparsify::apps::generators::gnp_graph;
use psd_sparsify::apps::subgraph_family_sparsify;
use psd_sparsify::{Algorithm, RunOptions};

fn main() -> psd_sparsify::Result<()> {
    let g = gnp_graph(40, 0.9, 1);
    let family: Vec<Vec<(usize, usize)>> = vec![
        g.edges()
            .iter()
            .filter(|e| e.u < 20 && e.v < 20)
            .map(|e| (e.u, e.v))
            .collect(),
        g.edges()
            .iter()
            .filter(|e| e.u >= 20)
            .map(|e| (e.u, e.v))
            .collect(),
        g.edges()
            .iter()
            .filter(|e| (e.u + e.v) % 2 == 1)
            .map(|e| (e.u, e.v))
            .collect(),
    ];
    let out = subgraph_family_sparsify(&g, &family, 3.0, Algorithm::Bss, &RunOptions::default())?;
    println!(
        "{} of {} edges, whole graph in [{:.3}, {:.3}]",
        out.sparsifier.support_size(),
        g.len(),
        out.graph.lambda_min,
        out.graph.lambda_max
    );
    for (i, c) in out.members.iter().enumerate() {
        println!("subgraph {i}: [{:.3}, {:.3}]", c.lambda_min, c.lambda_max);
    }
    Ok(())
}
