//! Hypergraphs through their clique expansion.
//!
//! A hyperedge `E` contributes the Laplacian of the complete graph on `E`,
//! so the quadratic form at a cut indicator counts crossing vertex pairs:
//! `w*(S) = sum_E w_E |S & E| |E \ S|`. The ordinary cut weight `w(S)`
//! counts crossing hyperedges. On an `r`-uniform hypergraph the two satisfy
//! `(r - 1) w(S) <= w*(S) <= floor(r/2) ceil(r/2) w(S)`, so a spectral
//! sparsifier also approximates `w` up to that factor.

use crate::algorithm::{sparsify_to_ratio, Algorithm, RunOptions};
use crate::collection::{PsdCollection, RankOne, SandwichCertificate};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperedge {
    /// Sorted, distinct vertices; at least two.
    pub vertices: Vec<usize>,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedHypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
}

impl WeightedHypergraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        let mut out = Vec::new();
        for (k, (mut vertices, w)) in edges.into_iter().enumerate() {
            vertices.sort_unstable();
            vertices.dedup();
            if vertices.len() < 2 {
                return Err(Error::InvalidGraph(format!(
                    "hyperedge {k} has fewer than two vertices"
                )));
            }
            if let Some(&v) = vertices.last().filter(|&&v| v >= n) {
                return Err(Error::InvalidGraph(format!(
                    "hyperedge {k} uses vertex {v} outside 0..{n}"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidGraph(format!("hyperedge {k} has weight {w}")));
            }
            out.push(Hyperedge { vertices, w });
        }
        Ok(WeightedHypergraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Common hyperedge size, if all hyperedges have the same size.
    pub fn uniformity(&self) -> Option<usize> {
        let r = self.edges.first()?.vertices.len();
        self.edges
            .iter()
            .all(|e| e.vertices.len() == r)
            .then_some(r)
    }

    pub fn reweighted(&self, y: &[f64]) -> WeightedHypergraph {
        let edges = self
            .edges
            .iter()
            .zip(y)
            .filter(|(_, &s)| s > 0.0)
            .map(|(e, &s)| Hyperedge {
                vertices: e.vertices.clone(),
                w: e.w * s,
            })
            .collect();
        WeightedHypergraph { n: self.n, edges }
    }

    pub fn edge_collection(&self) -> Result<PsdCollection> {
        PsdCollection::from_factors(
            self.n,
            self.edges
                .iter()
                .map(|e| clique_terms(&e.vertices, e.w))
                .collect(),
        )
    }
}

fn clique_terms(vertices: &[usize], w: f64) -> Vec<RankOne> {
    let mut terms = Vec::new();
    for (a, &u) in vertices.iter().enumerate() {
        for &v in &vertices[a + 1..] {
            terms.push(RankOne::edge(u, v, w));
        }
    }
    terms
}

/// Laplacian of the complete graph on `vertices`, embedded in dimension `n`.
pub fn clique_laplacian(n: usize, vertices: &[usize]) -> SymMatrix {
    let mut l = SymMatrix::zeros(n);
    for t in clique_terms(vertices, 1.0) {
        t.add_to(&mut l);
    }
    l
}

/// `sum_E w_E L_E`.
pub fn hypergraph_laplacian(h: &WeightedHypergraph) -> SymMatrix {
    let mut l = SymMatrix::zeros(h.n.max(1));
    for e in &h.edges {
        for t in clique_terms(&e.vertices, e.w) {
            t.add_to(&mut l);
        }
    }
    l
}

/// Total weight of hyperedges meeting both `S` and its complement.
pub fn cut_weight(h: &WeightedHypergraph, side: &[bool]) -> f64 {
    h.edges
        .iter()
        .filter(|e| {
            let inside = e.vertices.iter().filter(|&&v| side[v]).count();
            inside > 0 && inside < e.vertices.len()
        })
        .map(|e| e.w)
        .sum()
}

/// `sum_E w_E |S & E| |E \ S|`.
pub fn cut_weight_star(h: &WeightedHypergraph, side: &[bool]) -> f64 {
    h.edges
        .iter()
        .map(|e| {
            let inside = e.vertices.iter().filter(|&&v| side[v]).count();
            e.w * (inside * (e.vertices.len() - inside)) as f64
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct HypergraphSparsifier {
    pub hypergraph: WeightedHypergraph,
    pub y: Vec<f64>,
    pub certificate: SandwichCertificate,
}

pub fn sparsify_hypergraph(
    h: &WeightedHypergraph,
    target: f64,
    algorithm: Algorithm,
    options: &RunOptions,
) -> Result<HypergraphSparsifier> {
    if h.is_empty() {
        return Err(Error::EmptyProblem);
    }
    let out = sparsify_to_ratio(&h.edge_collection()?, algorithm, target, options)?;
    Ok(HypergraphSparsifier {
        hypergraph: h.reweighted(&out.result.y),
        y: out.result.y,
        certificate: out.result.certificate,
    })
}

/// Which cut inequality failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutCheck {
    /// `w*_H / w*_G` outside `[1, 1 + eps]`.
    StarRatio,
    /// `w_H / w_G` outside the window implied by uniformity.
    WeightRatio,
    /// `(r - 1) w <= w* <= floor(r/2) ceil(r/2) w` fails on either hypergraph.
    UniformSandwich,
    /// `w* = 2 w` fails for a 3-uniform hypergraph.
    ThreeUniformIdentity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutViolation {
    /// Vertices on the `S` side.
    pub set: Vec<usize>,
    pub check: CutCheck,
    pub value: f64,
}

/// Result of checking every cut of a sparsified hypergraph.
#[derive(Clone, Debug, PartialEq)]
pub struct CutReport {
    pub cuts_checked: usize,
    pub uniformity: Option<usize>,
    pub star_ratio_min: f64,
    pub star_ratio_max: f64,
    pub weight_ratio_min: f64,
    pub weight_ratio_max: f64,
    /// Sorted by vertex set, then by check.
    pub violations: Vec<CutViolation>,
}

impl CutReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest vertex count [`cut_sparsifier_report`] will enumerate.
pub const MAX_CUT_VERTICES: usize = 20;

/// `floor(r/2) ceil(r/2)`.
pub fn star_factor(r: usize) -> f64 {
    ((r / 2) * r.div_ceil(2)) as f64
}

fn ratio(sub: f64, orig: f64) -> f64 {
    if orig == 0.0 && sub == 0.0 {
        1.0
    } else {
        sub / orig
    }
}

/// Enumerates every cut `S` containing vertex `0` (each cut once, the
/// empty and full sets excluded) and checks the sparsifier against `h`
/// with relative tolerance `tol`.
pub fn cut_sparsifier_report(
    h: &WeightedHypergraph,
    sub: &WeightedHypergraph,
    eps: f64,
    tol: f64,
) -> Result<CutReport> {
    let n = h.n;
    if n > MAX_CUT_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "cut enumeration needs n <= {MAX_CUT_VERTICES}, got {n}"
        )));
    }
    if sub.n != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: sub.n,
        });
    }
    let uniformity = h.uniformity();
    let (w_lo, w_hi) = match uniformity {
        Some(r) => {
            let f = star_factor(r);
            ((r - 1) as f64 / f, (1.0 + eps) * f / (r - 1) as f64)
        }
        None => (0.0, f64::INFINITY),
    };
    let mut report = CutReport {
        cuts_checked: 0,
        uniformity,
        star_ratio_min: f64::INFINITY,
        star_ratio_max: f64::NEG_INFINITY,
        weight_ratio_min: f64::INFINITY,
        weight_ratio_max: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    if n < 2 {
        return Ok(report);
    }
    let mut side = vec![false; n];
    for mask in 0u32..(1u32 << (n - 1)) {
        // vertex 0 always on the S side; the last mask puts everything there
        side[0] = true;
        for (v, s) in side.iter_mut().enumerate().skip(1) {
            *s = mask >> (v - 1) & 1 == 1;
        }
        if side.iter().all(|&s| s) {
            continue;
        }
        report.cuts_checked += 1;
        let set: Vec<usize> = (0..n).filter(|&v| side[v]).collect();
        let mut flag = |check, value| {
            report.violations.push(CutViolation {
                set: set.clone(),
                check,
                value,
            })
        };

        let star_g = cut_weight_star(h, &side);
        let star_h = cut_weight_star(sub, &side);
        let w_g = cut_weight(h, &side);
        let w_h = cut_weight(sub, &side);

        let sr = ratio(star_h, star_g);
        if !(sr >= 1.0 - tol && sr <= (1.0 + eps) * (1.0 + tol)) {
            flag(CutCheck::StarRatio, sr);
        }
        let wr = ratio(w_h, w_g);
        if !(wr >= w_lo * (1.0 - tol) && wr <= w_hi * (1.0 + tol)) {
            flag(CutCheck::WeightRatio, wr);
        }
        if let Some(r) = uniformity {
            let f = star_factor(r);
            for (w, star) in [(w_g, star_g), (w_h, star_h)] {
                let slack = tol * star.abs().max(w.abs());
                if star < (r - 1) as f64 * w - slack || star > f * w + slack {
                    flag(CutCheck::UniformSandwich, star / w);
                }
                if r == 3 && (star - 2.0 * w).abs() > slack {
                    flag(CutCheck::ThreeUniformIdentity, star / w);
                }
            }
        }
        if star_g > 0.0 {
            report.star_ratio_min = report.star_ratio_min.min(sr);
            report.star_ratio_max = report.star_ratio_max.max(sr);
        }
        if w_g > 0.0 {
            report.weight_ratio_min = report.weight_ratio_min.min(wr);
            report.weight_ratio_max = report.weight_ratio_max.max(wr);
        }
    }
    report
        .violations
        .sort_by(|a, b| a.set.cmp(&b.set).then(a.check.cmp(&b.check)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;
    use approx::assert_abs_diff_eq;

    #[test]
    fn clique_spectra() {
        let l = clique_laplacian(4, &[0, 1, 2, 3]);
        let ev = eigenvalues(&l).unwrap();
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-12);
        for v in &ev[1..] {
            assert_abs_diff_eq!(*v, 4.0, epsilon = 1e-12);
        }
        let h = WeightedHypergraph::new(3, [(vec![0, 1, 2], 1.0)]).unwrap();
        let l = hypergraph_laplacian(&h);
        assert_eq!((l.get(0, 0), l.get(0, 1)), (2.0, -1.0));
    }

    #[test]
    fn cut_values() {
        let h = WeightedHypergraph::new(3, [(vec![0, 1, 2], 1.0)]).unwrap();
        let s = [true, false, false];
        assert_eq!(cut_weight(&h, &s), 1.0);
        assert_eq!(cut_weight_star(&h, &s), 2.0);
        let none = [false; 3];
        assert_eq!(cut_weight(&h, &none), 0.0);
        assert_eq!(cut_weight_star(&h, &none), 0.0);

        let h = WeightedHypergraph::new(6, [(vec![0, 1, 2, 3, 4], 1.5)]).unwrap();
        let s = [true, true, false, false, false, false];
        assert_eq!(cut_weight_star(&h, &s), 2.0 * 3.0 * 1.5);
    }

    #[test]
    fn star_matches_quadratic_form() {
        let h = WeightedHypergraph::new(
            5,
            [
                (vec![0, 1, 2], 1.0),
                (vec![1, 3, 4], 2.0),
                (vec![0, 4], 0.5),
            ],
        )
        .unwrap();
        let l = hypergraph_laplacian(&h);
        for mask in 0u32..32 {
            let side: Vec<bool> = (0..5).map(|v| mask >> v & 1 == 1).collect();
            let x: Vec<f64> = side.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect();
            assert_abs_diff_eq!(cut_weight_star(&h, &side), l.quad_form(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn factor_windows() {
        assert_eq!(star_factor(3), 2.0);
        assert_eq!(star_factor(4), 4.0);
        assert_eq!(star_factor(5), 6.0);
    }

    #[test]
    fn identical_hypergraph_passes() {
        let h = WeightedHypergraph::new(
            6,
            [
                (vec![0, 1, 2], 1.0),
                (vec![2, 3, 4], 1.0),
                (vec![1, 4, 5], 2.0),
            ],
        )
        .unwrap();
        let report = cut_sparsifier_report(&h, &h, 0.5, 1e-12).unwrap();
        assert_eq!(report.cuts_checked, 31);
        assert!(report.passed(), "{:?}", report.violations);
        let big = WeightedHypergraph::new(21, [(vec![0, 1], 1.0)]).unwrap();
        assert!(cut_sparsifier_report(&big, &big, 0.5, 0.0).is_err());
    }
}
