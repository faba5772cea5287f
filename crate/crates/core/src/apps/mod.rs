//! Problems that reduce to sparsifying a sum of PSD matrices.
//!
//! Every builder here turns its input into a [`PsdCollection`] (usually a
//! direct sum of blocks, one per constraint family), calls
//! [`sparsify_to_ratio`](crate::sparsify_to_ratio) and maps the weights back.
//! The `target` argument is the allowed relative excess: results satisfy
//! `B <= sum_i y_i B_i <= (1 + target) B` on the collection they were built
//! from.
//!
//! [`PsdCollection`]: crate::PsdCollection

pub mod caratheodory;
pub mod generators;
pub mod graph;
pub mod hypergraph;
pub mod necessity;
pub mod sdp;

pub use caratheodory::{caratheodory, CaratheodoryResult};
pub use graph::{
    laplacian, rainbow_sparsify, sparsify_graph, sparsify_with_costs, subgraph_family_sparsify,
    CostReport, Edge, FamilyReport, GraphSparsifier, WeightedGraph,
};
pub use hypergraph::{
    clique_laplacian, cut_sparsifier_report, cut_weight, cut_weight_star, hypergraph_laplacian,
    sparsify_hypergraph, CutReport, HypergraphSparsifier, WeightedHypergraph,
};
pub use necessity::{necessity_margin, psd_counterexample};
pub use sdp::{sparse_sdp, SdpInstance, SdpSolution};
