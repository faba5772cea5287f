//! Whitespace-delimited text formats.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.
//!
//! Matrix collection (0-based indices, upper or lower triangle, entries not
//! listed are zero):
//! ```text
//! n m
//! mat 0
//! i j v
//! ...
//! mat 1
//! ...
//! ```
//! Graph (1-based vertices): a line `n`, then one `u v w` line per edge.
//! Hypergraph: a line `n`, then `k v_1 ... v_k w` per hyperedge.
//! Costs: a line `k`, then one line of `k` values per edge, in edge order.
//! Subgraph family: blocks starting with `sub`, each followed by `u v` lines.
//! SDP: `n m`, `m` `mat` blocks for the `A_i`, a `target` block for `B`,
//! then `cost c_1 ... c_m` and `point z_1 ... z_m`.
//! Simplex: a matrix collection followed by `lambda l_1 ... l_m`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::apps::graph::WeightedGraph;
use crate::apps::hypergraph::WeightedHypergraph;
use crate::apps::sdp::SdpInstance;
use crate::collection::PsdCollection;
use crate::error::{Error, Result};
use crate::linalg::{SymMatrix, DEFAULT_PSD_TOL};

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

struct Lines<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last: usize,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<Line<'a>> = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.trim();
                (!l.is_empty() && !l.starts_with('#')).then(|| Line {
                    number: i + 1,
                    tokens: l.split_whitespace().collect(),
                })
            })
            .collect();
        let last = text.lines().count().max(1);
        Lines {
            lines,
            pos: 0,
            last,
        }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn expect(&mut self, what: &str) -> Result<&Line<'a>> {
        let last = self.last;
        self.next()
            .ok_or_else(|| err(last, format!("unexpected end of input, expected {what}")))
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Some(l) => Err(err(
                l.number,
                format!("unexpected trailing line '{}'", l.tokens.join(" ")),
            )),
            None => Ok(()),
        }
    }

    fn keyword_next(&self, word: &str) -> bool {
        self.peek().is_some_and(|l| l.tokens[0] == word)
    }
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| err(line, format!("cannot parse {what} from '{tok}'")))
}

fn real(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = num(line, tok, "a number")?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn arity(l: &Line, n: usize, what: &str) -> Result<()> {
    if l.tokens.len() != n {
        return Err(err(
            l.number,
            format!("expected {what}, found {} fields", l.tokens.len()),
        ));
    }
    Ok(())
}

fn header_pair(lines: &mut Lines) -> Result<(usize, usize)> {
    let l = lines.expect("header 'n m'")?;
    arity(l, 2, "header 'n m'")?;
    let n: usize = num(l.number, l.tokens[0], "dimension")?;
    let m: usize = num(l.number, l.tokens[1], "matrix count")?;
    if n == 0 {
        return Err(err(l.number, "dimension must be positive"));
    }
    Ok((n, m))
}

/// Reads `i j v` lines until the next keyword line or end of input.
fn entries(lines: &mut Lines, n: usize) -> Result<SymMatrix> {
    let mut m = SymMatrix::zeros(n);
    let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
    while let Some(l) = lines.peek() {
        if l.tokens[0].parse::<usize>().is_err() {
            break;
        }
        let l = lines.next().expect("peeked");
        arity(l, 3, "entry 'i j v'")?;
        let i: usize = num(l.number, l.tokens[0], "row index")?;
        let j: usize = num(l.number, l.tokens[1], "column index")?;
        let v = real(l.number, l.tokens[2])?;
        if i >= n || j >= n {
            return Err(err(l.number, format!("index ({i}, {j}) outside 0..{n}")));
        }
        let key = (i.min(j), i.max(j));
        if let Some(&prev) = seen.get(&key) {
            if prev != v {
                return Err(err(
                    l.number,
                    format!("entry ({i}, {j}) given as {prev} and {v}"),
                ));
            }
            continue;
        }
        seen.insert(key, v);
        m.set(key.0, key.1, v);
    }
    Ok(m)
}

fn matrix_blocks(lines: &mut Lines, n: usize, m: usize) -> Result<Vec<SymMatrix>> {
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let l = lines.expect("'mat' header")?;
        if l.tokens[0] != "mat" {
            return Err(err(
                l.number,
                format!("expected 'mat {k}', found '{}'", l.tokens.join(" ")),
            ));
        }
        arity(l, 2, "'mat k'")?;
        let idx: usize = num(l.number, l.tokens[1], "matrix index")?;
        if idx != k {
            return Err(err(
                l.number,
                format!("expected 'mat {k}', found 'mat {idx}'"),
            ));
        }
        out.push(entries(lines, n)?);
    }
    Ok(out)
}

/// Parses the raw matrices without checking that they are PSD.
pub fn parse_matrices(text: &str) -> Result<Vec<SymMatrix>> {
    let mut lines = Lines::new(text);
    let (n, m) = header_pair(&mut lines)?;
    let out = matrix_blocks(&mut lines, n, m)?;
    lines.finish()?;
    Ok(out)
}

pub fn parse_matrix_collection(text: &str) -> Result<PsdCollection> {
    parse_matrix_collection_with(text, DEFAULT_PSD_TOL)
}

pub fn parse_matrix_collection_with(text: &str, psd_tol: f64) -> Result<PsdCollection> {
    PsdCollection::new(parse_matrices(text)?, psd_tol)
}

fn write_entries(out: &mut String, m: &SymMatrix) {
    let n = m.dim();
    for i in 0..n {
        for j in i..n {
            let v = m.get(i, j);
            if v != 0.0 {
                let _ = writeln!(out, "{i} {j} {v:?}");
            }
        }
    }
}

pub fn emit_matrices(matrices: &[SymMatrix]) -> String {
    let n = matrices.first().map_or(0, SymMatrix::dim);
    let mut out = format!("{n} {}\n", matrices.len());
    for (k, m) in matrices.iter().enumerate() {
        let _ = writeln!(out, "mat {k}");
        write_entries(&mut out, m);
    }
    out
}

pub fn emit_matrix_collection(coll: &PsdCollection) -> String {
    emit_matrices(coll.matrices())
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<usize> {
    let v: usize = num(line, tok, "vertex")?;
    if v == 0 || v > n {
        return Err(err(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

fn count_header(lines: &mut Lines, what: &str) -> Result<usize> {
    let l = lines.expect(what)?;
    arity(l, 1, what)?;
    num(l.number, l.tokens[0], what)
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = Lines::new(text);
    let n = count_header(&mut lines, "vertex count")?;
    let mut edges = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    while let Some(l) = lines.next() {
        arity(l, 3, "edge 'u v w'")?;
        let u = vertex(l.number, l.tokens[0], n)?;
        let v = vertex(l.number, l.tokens[1], n)?;
        let w = real(l.number, l.tokens[2])?;
        if u == v {
            return Err(err(l.number, format!("self-loop at {}", u + 1)));
        }
        if w <= 0.0 {
            return Err(err(l.number, format!("weight {w} is not positive")));
        }
        if let Some(first) = seen.insert((u.min(v), u.max(v)), l.number) {
            return Err(err(
                l.number,
                format!("edge repeats the one on line {first}"),
            ));
        }
        edges.push((u, v, w));
    }
    WeightedGraph::new(n, edges)
}

pub fn emit_graph(g: &WeightedGraph) -> String {
    let mut out = format!("{}\n", g.n());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {:?}", e.u + 1, e.v + 1, e.w);
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<WeightedHypergraph> {
    let mut lines = Lines::new(text);
    let n = count_header(&mut lines, "vertex count")?;
    let mut edges = Vec::new();
    while let Some(l) = lines.next() {
        let k: usize = num(l.number, l.tokens[0], "hyperedge size")?;
        arity(
            l,
            k + 2,
            &format!("'{k}' followed by {k} vertices and a weight"),
        )?;
        let vertices = l.tokens[1..=k]
            .iter()
            .map(|t| vertex(l.number, t, n))
            .collect::<Result<Vec<_>>>()?;
        let w = real(l.number, l.tokens[k + 1])?;
        let h = WeightedHypergraph::new(n, [(vertices.clone(), w)])
            .map_err(|e| err(l.number, e.to_string()))?;
        if h.edges()[0].vertices.len() != k {
            return Err(err(l.number, "hyperedge repeats a vertex"));
        }
        edges.push((vertices, w));
    }
    WeightedHypergraph::new(n, edges)
}

pub fn emit_hypergraph(h: &WeightedHypergraph) -> String {
    let mut out = format!("{}\n", h.n());
    for e in h.edges() {
        let _ = write!(out, "{}", e.vertices.len());
        for v in &e.vertices {
            let _ = write!(out, " {}", v + 1);
        }
        let _ = writeln!(out, " {:?}", e.w);
    }
    out
}

/// Returns the cost vectors, one per cost, each indexed by edge.
pub fn parse_costs(text: &str, edges: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = Lines::new(text);
    let k = count_header(&mut lines, "cost count")?;
    let mut costs = vec![Vec::with_capacity(edges); k];
    for e in 0..edges {
        let l = lines.expect(&format!("costs for edge {}", e + 1))?;
        arity(l, k, &format!("{k} costs"))?;
        for (i, t) in l.tokens.iter().enumerate() {
            let v = real(l.number, t)?;
            if v < 0.0 {
                return Err(err(l.number, format!("cost {v} is negative")));
            }
            costs[i].push(v);
        }
    }
    lines.finish()?;
    Ok(costs)
}

pub fn emit_costs(costs: &[Vec<f64>]) -> String {
    let mut out = format!("{}\n", costs.len());
    let edges = costs.first().map_or(0, Vec::len);
    for e in 0..edges {
        let row: Vec<String> = costs.iter().map(|c| format!("{:?}", c[e])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Subgraphs as 0-based vertex pairs; vertices are checked against `n`.
pub fn parse_family(text: &str, n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let mut lines = Lines::new(text);
    let mut family: Vec<Vec<(usize, usize)>> = Vec::new();
    while let Some(l) = lines.next() {
        if l.tokens[0] == "sub" {
            arity(l, 1, "'sub'")?;
            family.push(Vec::new());
            continue;
        }
        let current = family
            .last_mut()
            .ok_or_else(|| err(l.number, "edge listed before the first 'sub'"))?;
        arity(l, 2, "edge 'u v'")?;
        let u = vertex(l.number, l.tokens[0], n)?;
        let v = vertex(l.number, l.tokens[1], n)?;
        current.push((u, v));
    }
    Ok(family)
}

pub fn emit_family(family: &[Vec<(usize, usize)>]) -> String {
    let mut out = String::new();
    for f in family {
        out.push_str("sub\n");
        for &(u, v) in f {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
    }
    out
}

fn vector_line(lines: &mut Lines, keyword: &str, m: usize) -> Result<Vec<f64>> {
    let l = lines.expect(&format!("'{keyword}' line"))?;
    if l.tokens[0] != keyword {
        return Err(err(
            l.number,
            format!("expected '{keyword}', found '{}'", l.tokens[0]),
        ));
    }
    arity(l, m + 1, &format!("'{keyword}' and {m} values"))?;
    l.tokens[1..].iter().map(|t| real(l.number, t)).collect()
}

pub fn parse_sdp(text: &str) -> Result<SdpInstance> {
    let mut lines = Lines::new(text);
    let (n, m) = header_pair(&mut lines)?;
    let a = matrix_blocks(&mut lines, n, m)?;
    let l = lines.expect("'target' block")?;
    if l.tokens != ["target"] {
        return Err(err(
            l.number,
            format!("expected 'target', found '{}'", l.tokens.join(" ")),
        ));
    }
    let b = entries(&mut lines, n)?;
    let c = vector_line(&mut lines, "cost", m)?;
    let z = vector_line(&mut lines, "point", m)?;
    lines.finish()?;
    Ok(SdpInstance { a, b, c, z })
}

pub fn emit_sdp(inst: &SdpInstance) -> String {
    let mut out = emit_matrices(&inst.a);
    out.push_str("target\n");
    write_entries(&mut out, &inst.b);
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "cost {}", join(&inst.c));
    let _ = writeln!(out, "point {}", join(&inst.z));
    out
}

/// A collection with a point `lambda` on the simplex.
pub fn parse_simplex(text: &str, psd_tol: f64) -> Result<(PsdCollection, Vec<f64>)> {
    let mut lines = Lines::new(text);
    let (n, m) = header_pair(&mut lines)?;
    let matrices = matrix_blocks(&mut lines, n, m)?;
    if !lines.keyword_next("lambda") {
        let line = lines.peek().map_or(lines.last, |l| l.number);
        return Err(err(line, "expected 'lambda' line"));
    }
    let lambdas = vector_line(&mut lines, "lambda", m)?;
    lines.finish()?;
    Ok((PsdCollection::new(matrices, psd_tol)?, lambdas))
}

pub fn emit_simplex(coll: &PsdCollection, lambdas: &[f64]) -> String {
    let mut out = emit_matrix_collection(coll);
    let vals: Vec<String> = lambdas.iter().map(|x| format!("{x:?}")).collect();
    let _ = writeln!(out, "lambda {}", vals.join(" "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collection_examples() {
        let c = parse_matrix_collection("2 1\nmat 0\n0 0 1.0\n1 1 1.0\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.get(0), &SymMatrix::identity(2));
        let c = parse_matrix_collection("2 2\nmat 0\n0 0 1\nmat 1\n1 1 1\n").unwrap();
        assert_eq!(c.get(0), &SymMatrix::from_diagonal(&[1.0, 0.0]));
        assert_eq!(c.get(1), &SymMatrix::from_diagonal(&[0.0, 1.0]));
    }

    #[test]
    fn collection_errors() {
        assert!(matches!(
            parse_matrices("2 1\n0 0 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrices("2 1\nmat 0\n0 1 1.0\n1 0 2.0\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(parse_matrices("2 1\nmat 0\n0 1 1.0\n1 0 1.0\n").is_ok());
        assert!(matches!(
            parse_matrices("2 1\nmat 0\n0 2 1.0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_matrices("2 2\nmat 0\n0 0 1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn graph_examples() {
        let g = parse_graph("2\n1 2 3.0\n").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(
            (g.edges()[0].u, g.edges()[0].v, g.edges()[0].w),
            (0, 1, 3.0)
        );
        assert!(matches!(
            parse_graph("2\n1 3 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("3\n1 2 1\n# dup\n2 1 1\n"),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn hypergraph_examples() {
        let h = parse_hypergraph("3\n3 1 2 3 1.0\n").unwrap();
        assert_eq!(h.edges()[0].vertices, vec![0, 1, 2]);
        assert_eq!(h.edges()[0].w, 1.0);
        assert!(matches!(
            parse_hypergraph("3\n3 1 2 4 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_hypergraph("3\n3 1 2 2 1.0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn costs_family_sdp_simplex() {
        let costs = parse_costs("2\n1 0\n0.5 2\n", 2).unwrap();
        assert_eq!(costs, vec![vec![1.0, 0.5], vec![0.0, 2.0]]);
        assert!(parse_costs("1\n-1\n", 1).is_err());
        let fam = parse_family("sub\n1 2\n2 3\nsub\n1 3\n", 3).unwrap();
        assert_eq!(fam, vec![vec![(0, 1), (1, 2)], vec![(0, 2)]]);
        assert!(parse_family("1 2\n", 3).is_err());

        let sdp =
            parse_sdp("2 1\nmat 0\n0 0 1\n1 1 1\ntarget\n0 0 1\n1 1 1\ncost 2\npoint 1\n").unwrap();
        assert_eq!(sdp.c, vec![2.0]);
        assert_eq!(sdp.b, SymMatrix::identity(2));
        let (coll, lambdas) =
            parse_simplex("1 2\nmat 0\n0 0 1\nmat 1\n0 0 2\nlambda 0.25 0.75\n", 1e-9).unwrap();
        assert_eq!(coll.len(), 2);
        assert_eq!(lambdas, vec![0.25, 0.75]);
    }
}
