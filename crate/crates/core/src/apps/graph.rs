//! Graph Laplacians and the sparsifiers built on them: plain spectral
//! sparsifiers, sparsifiers that also preserve linear edge costs, rainbow
//! sparsifiers, and simultaneous sparsifiers for a family of subgraphs.

use std::collections::HashMap;

use crate::algorithm::{sparsify_to_ratio, Algorithm, RunOptions};
use crate::collection::{PsdCollection, RankOne, SandwichCertificate};
use crate::error::{Error, Result};
use crate::linalg::{default_rank_tol, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected graph on vertices `0..n` with positive edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Stores every edge with `u < v`. Self-loops, duplicate pairs,
    /// out-of-range endpoints and non-positive weights are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for (k, (a, b, w)) in edges.into_iter().enumerate() {
            let (u, v) = (a.min(b), a.max(b));
            if u == v {
                return Err(Error::InvalidGraph(format!(
                    "edge {k} is a self-loop at {u}"
                )));
            }
            if v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {k} ({a}, {b}) leaves 0..{n}"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidGraph(format!("edge {k} has weight {w}")));
            }
            if let Some(first) = seen.insert((u, v), k) {
                return Err(Error::InvalidGraph(format!(
                    "edges {first} and {k} both join {u} and {v}"
                )));
            }
            out.push(Edge { u, v, w });
        }
        Ok(WeightedGraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Index of the edge joining `a` and `b`, in either order.
    pub fn find(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = (a.min(b), a.max(b));
        self.edges.iter().position(|e| e.u == u && e.v == v)
    }

    /// Total weight of edges with exactly one endpoint in `side`.
    pub fn cut(&self, side: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|e| side[e.u] != side[e.v])
            .map(|e| e.w)
            .sum()
    }

    /// The same vertex set with edge `k` reweighted to `y[k] w_k`; edges
    /// with `y[k] = 0` are dropped.
    pub fn reweighted(&self, y: &[f64]) -> WeightedGraph {
        let edges = self
            .edges
            .iter()
            .zip(y)
            .filter(|(_, &s)| s > 0.0)
            .map(|(e, &s)| Edge { w: e.w * s, ..*e })
            .collect();
        WeightedGraph { n: self.n, edges }
    }

    /// One weighted edge Laplacian per edge, as a collection.
    pub fn edge_collection(&self) -> Result<PsdCollection> {
        PsdCollection::from_factors(
            self.n,
            self.edges
                .iter()
                .map(|e| vec![RankOne::edge(e.u, e.v, e.w)])
                .collect(),
        )
    }
}

/// `sum_e w_e (e_u - e_v)(e_u - e_v)^T`.
pub fn laplacian(g: &WeightedGraph) -> SymMatrix {
    let mut l = SymMatrix::zeros(g.n.max(1));
    for e in &g.edges {
        RankOne::edge(e.u, e.v, e.w).add_to(&mut l);
    }
    l
}

/// Whitened spectrum of `L_G(y w)` against `L_G(w)`.
pub fn laplacian_certificate(g: &WeightedGraph, y: &[f64]) -> Result<SandwichCertificate> {
    let coll = g.edge_collection()?;
    let reduced = crate::reduce_to_identity(&coll, default_rank_tol(coll.dim()))?;
    reduced.certificate(y)
}

/// A reweighted subgraph with the multipliers that produced it.
#[derive(Clone, Debug)]
pub struct GraphSparsifier {
    pub graph: WeightedGraph,
    /// Multiplier `y_e` per original edge; the new weight is `y_e w_e`.
    pub y: Vec<f64>,
    /// Certificate of the full collection that was sparsified.
    pub certificate: SandwichCertificate,
}

impl GraphSparsifier {
    pub fn support_size(&self) -> usize {
        self.graph.len()
    }
}

fn check_nonempty(g: &WeightedGraph) -> Result<()> {
    if g.is_empty() {
        return Err(Error::EmptyProblem);
    }
    Ok(())
}

/// Spectral sparsifier: `L_G <= L_H <= (1 + target) L_G`.
pub fn sparsify_graph(
    g: &WeightedGraph,
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<GraphSparsifier> {
    check_nonempty(g)?;
    let coll = g.edge_collection()?;
    let out = sparsify_to_ratio(&coll, algorithm, target, options)?;
    Ok(GraphSparsifier {
        graph: g.reweighted(&out.result.y),
        y: out.result.y,
        certificate: out.result.certificate,
    })
}

/// Total of one cost vector before and after reweighting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostReport {
    pub original: f64,
    pub sparsified: f64,
}

impl CostReport {
    /// `sparsified / original`, or 1 when both are zero.
    pub fn ratio(&self) -> f64 {
        if self.original == 0.0 && self.sparsified == 0.0 {
            1.0
        } else {
            self.sparsified / self.original
        }
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        let r = self.ratio();
        r >= lo && r <= hi
    }
}

/// Sparsifier that also keeps each cost total `sum_e w_e c_{i,e}` within
/// the same window as the Laplacian.
#[derive(Clone, Debug)]
pub struct CostSparsifier {
    pub sparsifier: GraphSparsifier,
    /// Certificate of the Laplacian part alone.
    pub laplacian: SandwichCertificate,
    pub costs: Vec<CostReport>,
}

fn cost_reports(g: &WeightedGraph, costs: &[Vec<f64>], y: &[f64]) -> Vec<CostReport> {
    costs
        .iter()
        .map(|c| {
            let mut original = 0.0;
            let mut sparsified = 0.0;
            for ((e, &ce), &ye) in g.edges.iter().zip(c).zip(y) {
                original += e.w * ce;
                sparsified += ye * e.w * ce;
            }
            CostReport {
                original,
                sparsified,
            }
        })
        .collect()
}

/// Per edge, `w_e [(e_u - e_v)(e_u - e_v)^T (+) c_{1,e} (+) ... (+) c_{k,e}]`.
pub fn cost_collection(g: &WeightedGraph, costs: &[Vec<f64>]) -> Result<PsdCollection> {
    for (i, c) in costs.iter().enumerate() {
        if c.len() != g.len() {
            return Err(Error::DimMismatch {
                expected: g.len(),
                found: c.len(),
            });
        }
        if let Some((e, &value)) = c
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidCost {
                cost: i,
                edge: e,
                value,
            });
        }
    }
    let dim = g.n + costs.len();
    let factors = g
        .edges
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut terms = vec![RankOne::edge(e.u, e.v, e.w)];
            for (i, c) in costs.iter().enumerate() {
                if c[k] > 0.0 {
                    terms.push(RankOne {
                        scale: e.w * c[k],
                        entries: vec![(g.n + i, 1.0)],
                    });
                }
            }
            terms
        })
        .collect();
    PsdCollection::from_factors(dim, factors)
}

pub fn sparsify_with_costs(
    g: &WeightedGraph,
    costs: &[Vec<f64>],
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<CostSparsifier> {
    check_nonempty(g)?;
    let coll = cost_collection(g, costs)?;
    let out = sparsify_to_ratio(&coll, algorithm, target, options)?;
    let y = out.result.y;
    Ok(CostSparsifier {
        laplacian: laplacian_certificate(g, &y)?,
        costs: cost_reports(g, costs, &y),
        sparsifier: GraphSparsifier {
            graph: g.reweighted(&y),
            y,
            certificate: out.result.certificate,
        },
    })
}

/// Cost sparsifier with one indicator cost per color class. Each class
/// weight stays within `[W_i, (1 + target) W_i]`.
pub fn rainbow_sparsify(
    g: &WeightedGraph,
    coloring: &[usize],
    classes: usize,
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<CostSparsifier> {
    if coloring.len() != g.len() {
        return Err(Error::InvalidColoring(format!(
            "{} colors given for {} edges",
            coloring.len(),
            g.len()
        )));
    }
    if let Some((e, &c)) = coloring.iter().enumerate().find(|(_, &c)| c >= classes) {
        return Err(Error::InvalidColoring(format!(
            "edge {e} has color {c}, only {classes} classes"
        )));
    }
    let costs: Vec<Vec<f64>> = (0..classes)
        .map(|class| {
            coloring
                .iter()
                .map(|&c| if c == class { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    sparsify_with_costs(g, &costs, target, algorithm, options)
}

/// Certificates for the whole graph and for each member of the family.
#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub sparsifier: GraphSparsifier,
    pub graph: SandwichCertificate,
    pub members: Vec<SandwichCertificate>,
}

/// A subgraph given by edges of `g`, with its vertex set relabeled to
/// `0..|V(F)|` in increasing order.
struct Member {
    edges: Vec<usize>,
    local: HashMap<usize, usize>,
}

fn resolve_family(g: &WeightedGraph, family: &[Vec<(usize, usize)>]) -> Result<Vec<Member>> {
    family
        .iter()
        .enumerate()
        .map(|(f, pairs)| {
            if pairs.is_empty() {
                return Err(Error::InvalidFamily(format!("subgraph {f} has no edges")));
            }
            let mut edges = Vec::with_capacity(pairs.len());
            for &(a, b) in pairs {
                let k = g.find(a, b).ok_or_else(|| {
                    Error::InvalidFamily(format!(
                        "subgraph {f} uses ({a}, {b}), which is not an edge"
                    ))
                })?;
                if edges.contains(&k) {
                    return Err(Error::InvalidFamily(format!(
                        "subgraph {f} repeats ({a}, {b})"
                    )));
                }
                edges.push(k);
            }
            let mut vertices: Vec<usize> = edges
                .iter()
                .flat_map(|&k| [g.edges[k].u, g.edges[k].v])
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            let local = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            Ok(Member { edges, local })
        })
        .collect()
}

/// Per edge, `w_e [L_G(e) (+) L_{F_1}(e) (+) ...]` where `L_F(e)` is the
/// edge Laplacian on `V(F)` when `e` lies in `F` and zero otherwise.
fn family_collection(g: &WeightedGraph, members: &[Member]) -> Result<PsdCollection> {
    let mut offsets = Vec::with_capacity(members.len());
    let mut dim = g.n;
    for m in members {
        offsets.push(dim);
        dim += m.local.len();
    }
    let factors = g
        .edges
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut terms = vec![RankOne::edge(e.u, e.v, e.w)];
            for (m, &off) in members.iter().zip(&offsets) {
                if m.edges.contains(&k) {
                    terms.push(RankOne::edge(off + m.local[&e.u], off + m.local[&e.v], e.w));
                }
            }
            terms
        })
        .collect();
    PsdCollection::from_factors(dim, factors)
}

/// The lifted collection [`subgraph_family_sparsify`] works on: each edge
/// carries its Laplacian term plus one copy per subgraph containing it.
pub fn family_edge_collection(
    g: &WeightedGraph,
    family: &[Vec<(usize, usize)>],
) -> Result<PsdCollection> {
    family_collection(g, &resolve_family(g, family)?)
}

fn member_certificate(
    g: &WeightedGraph,
    member: &Member,
    y: &[f64],
) -> Result<SandwichCertificate> {
    let n = member.local.len();
    let factors = (0..g.len())
        .map(|k| {
            if member.edges.contains(&k) {
                let e = g.edges[k];
                vec![RankOne::edge(member.local[&e.u], member.local[&e.v], e.w)]
            } else {
                Vec::new()
            }
        })
        .collect();
    let coll = PsdCollection::from_factors(n, factors)?;
    crate::reduce_to_identity(&coll, default_rank_tol(n))?.certificate(y)
}

/// One set of multipliers that sparsifies `g` and every subgraph in
/// `family` at once. Subgraphs are given as lists of edges of `g`.
pub fn subgraph_family_sparsify(
    g: &WeightedGraph,
    family: &[Vec<(usize, usize)>],
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<FamilyReport> {
    check_nonempty(g)?;
    let members = resolve_family(g, family)?;
    let coll = family_collection(g, &members)?;
    let out = sparsify_to_ratio(&coll, algorithm, target, options)?;
    let y = out.result.y;
    let member_certs = members
        .iter()
        .map(|m| member_certificate(g, m, &y))
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyReport {
        graph: laplacian_certificate(g, &y)?,
        members: member_certs,
        sparsifier: GraphSparsifier {
            graph: g.reweighted(&y),
            y,
            certificate: out.result.certificate,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;
    use approx::assert_abs_diff_eq;

    fn complete(n: usize) -> WeightedGraph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, 1.0));
            }
        }
        WeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let g = WeightedGraph::new(2, [(0, 1, 3.0)]).unwrap();
        let l = laplacian(&g);
        assert_eq!((l.get(0, 0), l.get(0, 1), l.get(1, 1)), (3.0, -3.0, 3.0));
        let empty = WeightedGraph::new(3, []).unwrap();
        assert_eq!(laplacian(&empty).frobenius_norm(), 0.0);
        let tri = laplacian(&complete(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(tri.get(i, j), if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(WeightedGraph::new(3, [(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 3, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 0.0)]).is_err());
    }

    #[test]
    fn single_edge_is_kept() {
        let g = WeightedGraph::new(2, [(0, 1, 2.5)]).unwrap();
        let s = sparsify_graph(&g, 0.5, Algorithm::Bss, &RunOptions::default()).unwrap();
        assert_eq!(s.graph.len(), 1);
        assert_abs_diff_eq!(s.graph.edges()[0].w, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.certificate.ratio(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complete_four_within_ratio() {
        let g = complete(4);
        let s = sparsify_graph(&g, 0.5, Algorithm::Bss, &RunOptions::default()).unwrap();
        assert!(s.certificate.passes(0.5, 1e-9));
        let l = laplacian(&g);
        let lh = laplacian(&s.graph);
        // compare on the complement of the all-ones vector
        let ev = eigenvalues(&lh.sub(&l)).unwrap();
        assert!(ev[0] >= -1e-9);
        let ev = eigenvalues(&l.scaled(1.5).sub(&lh)).unwrap();
        assert!(ev[0] >= -1e-9);
    }

    #[test]
    fn single_cost_preserves_total_weight() {
        let g = complete(5);
        let costs = vec![g.edges().iter().map(|e| e.w).collect::<Vec<_>>()];
        let s =
            sparsify_with_costs(&g, &costs, 0.5, Algorithm::Bss, &RunOptions::default()).unwrap();
        assert!(s.costs[0].within(1.0 - 1e-9, 1.5 + 1e-9));
        assert!(s.laplacian.passes(0.5, 1e-9));
    }

    #[test]
    fn negative_cost_rejected() {
        let g = complete(3);
        let err = cost_collection(&g, &[vec![1.0, -1.0, 0.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidCost {
                cost: 0,
                edge: 1,
                value: -1.0
            }
        );
    }

    #[test]
    fn singleton_classes_keep_every_edge() {
        let g = complete(4);
        let coloring: Vec<usize> = (0..g.len()).collect();
        let s = rainbow_sparsify(
            &g,
            &coloring,
            g.len(),
            0.5,
            Algorithm::Bss,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(s.sparsifier.graph.len(), g.len());
        for (e, ye) in s.sparsifier.y.iter().enumerate() {
            assert!(*ye >= 1.0 - 1e-9 && *ye <= 1.5 + 1e-9, "edge {e}: {ye}");
        }
        assert!(
            rainbow_sparsify(&g, &[0; 3], 1, 0.5, Algorithm::Bss, &RunOptions::default()).is_err()
        );
    }

    #[test]
    fn family_of_whole_graph_matches() {
        let g = complete(4);
        let all: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        let r = subgraph_family_sparsify(&g, &[all], 0.5, Algorithm::Bss, &RunOptions::default())
            .unwrap();
        assert_abs_diff_eq!(r.graph.lambda_min, r.members[0].lambda_min, epsilon = 1e-10);
        assert_abs_diff_eq!(r.graph.lambda_max, r.members[0].lambda_max, epsilon = 1e-10);
        let bad = subgraph_family_sparsify(
            &WeightedGraph::new(3, [(0, 1, 1.0)]).unwrap(),
            &[vec![(0, 2)]],
            0.5,
            Algorithm::Bss,
            &RunOptions::default(),
        );
        assert!(matches!(bad, Err(Error::InvalidFamily(_))));
    }
}
