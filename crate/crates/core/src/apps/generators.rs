//! Seeded instance generators used by the examples and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::apps::graph::WeightedGraph;
use crate::apps::hypergraph::WeightedHypergraph;
use crate::collection::PsdCollection;
use crate::error::Result;
use crate::linalg::SymMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G G^T` for a `dim x rank` standard Gaussian `G`.
pub fn random_psd(rng: &mut impl Rng, dim: usize, rank: usize) -> SymMatrix {
    let mut m = SymMatrix::zeros(dim);
    for _ in 0..rank {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        m.axpy(1.0, &SymMatrix::outer(&v, 1.0));
    }
    m
}

/// `m` Gaussian PSD matrices of dimension `dim` with ranks drawn uniformly
/// from `1..=max_rank`.
pub fn random_collection(
    seed: u64,
    dim: usize,
    m: usize,
    max_rank: usize,
) -> Result<PsdCollection> {
    let mut rng = rng(seed);
    let matrices = (0..m)
        .map(|_| {
            let rank = rng.random_range(1..=max_rank.max(1));
            random_psd(&mut rng, dim, rank)
        })
        .collect();
    PsdCollection::from_matrices(matrices)
}

pub fn complete_graph(n: usize) -> WeightedGraph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0)));
    WeightedGraph::new(n, edges).expect("complete graph is valid")
}

pub fn cycle_graph(n: usize) -> WeightedGraph {
    let edges: Vec<(usize, usize, f64)> = match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1, 1.0)],
        _ => (0..n).map(|u| (u, (u + 1) % n, 1.0)).collect(),
    };
    WeightedGraph::new(n, edges).expect("cycle is valid")
}

pub fn path_graph(n: usize) -> WeightedGraph {
    WeightedGraph::new(n, (1..n).map(|v| (v - 1, v, 1.0))).expect("path is valid")
}

/// Each pair joined with probability `p`, unit weights.
pub fn gnp_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    WeightedGraph::new(n, edges).expect("random graph is valid")
}

/// `m` hyperedges of size `r` on `n` vertices, weights uniform in `[0.5, 2)`.
pub fn uniform_hypergraph(n: usize, r: usize, m: usize, seed: u64) -> WeightedHypergraph {
    assert!(r >= 2 && r <= n, "need 2 <= r <= n");
    let mut rng = rng(seed);
    let edges: Vec<(Vec<usize>, f64)> = (0..m)
        .map(|_| {
            let picked = rand::seq::index::sample(&mut rng, n, r).into_vec();
            (picked, rng.random_range(0.5..2.0))
        })
        .collect();
    WeightedHypergraph::new(n, edges).expect("random hypergraph is valid")
}
