//! Plain and edge-colored graphs, weight vectors and the ECG text format.
//!
//! Vertices and colors are dense 0-based ids. The edge order of an
//! [`EdgeColoredGraph`] is the order the edges were supplied in, and it is the
//! vertex order of every conflict graph built from it.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

/// Errors raised while constructing or parsing graphs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: loop edge on vertex {vertex}")]
    LoopEdge { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: color {color} out of range (k = {k})")]
    ColorOutOfRange { line: usize, color: usize, k: usize },
    #[error("color {color} is not used by any edge")]
    UnusedColor { color: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("invalid weights: {0}")]
    Weights(String),
}

/// A finite simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlainGraph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    #[serde(skip)]
    rows: Vec<Vec<u64>>,
}

impl PlainGraph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            adjacency: vec![Vec::new(); n],
            rows: vec![vec![0; words]; n],
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::new(n);
        for (i, &(u, v)) in edges.iter().enumerate() {
            g.add_edge(u, v).map_err(|e| e.at_line(i + 1))?;
        }
        Ok(g)
    }

    /// Cycle `0-1-...-(n-1)-0`.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("valid path")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).expect("fresh edge");
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange { line: 0, vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::LoopEdge { line: 0, vertex: u });
        }
        if self.adjacent(u, v) {
            return Err(GraphError::DuplicateEdge { line: 0, u, v });
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adjacency[a];
            let pos = list.partition_point(|&x| x < b);
            list.insert(pos, b);
            self.rows[a][b / 64] |= 1 << (b % 64);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u][v / 64] >> (v % 64) & 1 == 1
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.adjacency[u].iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    /// Induced subgraph on `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> PlainGraph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = PlainGraph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adjacency[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).expect("induced edge is fresh");
                }
            }
        }
        g
    }

    /// Subgraph with `removed` vertices deleted, plus the surviving vertex list.
    pub fn without(&self, removed: &[usize]) -> (PlainGraph, Vec<usize>) {
        let mut keep = vec![true; self.n];
        for &v in removed {
            keep[v] = false;
        }
        let vertices: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        (self.induced(&vertices), vertices)
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.adjacent(u, v)))
    }

    pub fn is_stable(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| !self.adjacent(u, v)))
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    pub fn complement(&self) -> PlainGraph {
        let mut g = PlainGraph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.adjacent(u, v) {
                    g.add_edge(u, v).expect("fresh edge");
                }
            }
        }
        g
    }

    /// Adjacency rows as bitmasks; only valid for `n <= 64`.
    pub fn masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask view needs n <= 64");
        self.rows.iter().map(|r| r.first().copied().unwrap_or(0)).collect()
    }
}

impl GraphError {
    fn at_line(self, line: usize) -> Self {
        match self {
            GraphError::LoopEdge { vertex, .. } => GraphError::LoopEdge { line, vertex },
            GraphError::DuplicateEdge { u, v, .. } => GraphError::DuplicateEdge { line, u, v },
            GraphError::VertexOutOfRange { vertex, n, .. } => {
                GraphError::VertexOutOfRange { line, vertex, n }
            }
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColoredEdge {
    pub u: usize,
    pub v: usize,
    pub color: usize,
}

impl ColoredEdge {
    pub fn shares_endpoint(&self, other: &ColoredEdge) -> bool {
        self.u == other.u || self.u == other.v || self.v == other.u || self.v == other.v
    }
}

/// An edge-colored graph `(G, C, c)` whose colors partition the edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeColoredGraph {
    #[serde(skip)]
    base: PlainGraph,
    n: usize,
    edges: Vec<ColoredEdge>,
    color_count: usize,
    #[serde(skip)]
    classes: Vec<Vec<usize>>,
}

impl EdgeColoredGraph {
    /// Validates and builds an instance; edge order is kept as given.
    pub fn new(n: usize, color_count: usize, edges: Vec<ColoredEdge>) -> Result<Self, GraphError> {
        let mut base = PlainGraph::new(n);
        let mut classes = vec![Vec::new(); color_count];
        for (i, e) in edges.iter().enumerate() {
            let line = i + 1;
            base.add_edge(e.u, e.v).map_err(|err| err.at_line(line))?;
            if e.color >= color_count {
                return Err(GraphError::ColorOutOfRange { line, color: e.color, k: color_count });
            }
            classes[e.color].push(i);
        }
        if let Some(color) = classes.iter().position(Vec::is_empty) {
            return Err(GraphError::UnusedColor { color });
        }
        Ok(Self { base, n, edges, color_count, classes })
    }

    /// Convenience constructor from `(u, v, color)` triples; `k` is inferred
    /// as one more than the largest color.
    pub fn from_triples(n: usize, triples: &[(usize, usize, usize)]) -> Result<Self, GraphError> {
        let k = triples.iter().map(|t| t.2 + 1).max().unwrap_or(0);
        let edges = triples.iter().map(|&(u, v, color)| ColoredEdge { u, v, color }).collect();
        Self::new(n, k, edges)
    }

    pub fn base(&self) -> &PlainGraph {
        &self.base
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    pub fn edges(&self) -> &[ColoredEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> ColoredEdge {
        self.edges[i]
    }

    /// Edge indices of color class `c`, ascending.
    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Instance with all edges of the `deleted` colors removed.
    ///
    /// Surviving colors are renumbered densely in ascending order. Returns the
    /// instance, the original index of each surviving edge and the original
    /// id of each surviving color.
    pub fn delete_colors(&self, deleted: &[usize]) -> (EdgeColoredGraph, Vec<usize>, Vec<usize>) {
        let mut gone = vec![false; self.color_count];
        for &c in deleted {
            gone[c] = true;
        }
        let kept_colors: Vec<usize> = (0..self.color_count).filter(|&c| !gone[c]).collect();
        let mut new_id = vec![usize::MAX; self.color_count];
        for (i, &c) in kept_colors.iter().enumerate() {
            new_id[c] = i;
        }
        let mut edge_map = Vec::new();
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !gone[e.color] {
                edge_map.push(i);
                edges.push(ColoredEdge { color: new_id[e.color], ..*e });
            }
        }
        let g = EdgeColoredGraph::new(self.n, kept_colors.len(), edges)
            .expect("color deletion preserves validity");
        (g, edge_map, kept_colors)
    }

    /// Sub-instance spanned by the given colors. Vertices touched by those
    /// colors are renumbered in ascending order; colors are renumbered by
    /// their position in `colors` (which must be sorted).
    pub fn restrict_to_colors(&self, colors: &[usize]) -> (EdgeColoredGraph, Vec<usize>) {
        let mut new_color = vec![usize::MAX; self.color_count];
        for (i, &c) in colors.iter().enumerate() {
            new_color[c] = i;
        }
        let mut vertex_used = vec![false; self.n];
        let mut picked = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if new_color[e.color] != usize::MAX {
                vertex_used[e.u] = true;
                vertex_used[e.v] = true;
                picked.push(i);
            }
        }
        let mut new_vertex = vec![usize::MAX; self.n];
        let mut count = 0;
        for v in 0..self.n {
            if vertex_used[v] {
                new_vertex[v] = count;
                count += 1;
            }
        }
        let edges = picked
            .iter()
            .map(|&i| {
                let e = self.edges[i];
                ColoredEdge { u: new_vertex[e.u], v: new_vertex[e.v], color: new_color[e.color] }
            })
            .collect();
        let g = EdgeColoredGraph::new(count, colors.len(), edges).expect("restriction is valid");
        (g, picked)
    }

    /// Checks that `edges` form a rainbow matching: pairwise vertex-disjoint
    /// and at most one edge per color.
    pub fn is_rainbow_matching(&self, edges: &[usize]) -> bool {
        let mut used_vertex = vec![false; self.n];
        let mut used_color = vec![false; self.color_count];
        for &i in edges {
            let Some(e) = self.edges.get(i) else { return false };
            if used_vertex[e.u] || used_vertex[e.v] || used_color[e.color] {
                return false;
            }
            used_vertex[e.u] = true;
            used_vertex[e.v] = true;
            used_color[e.color] = true;
        }
        true
    }
}

/// Nonnegative rational edge weights, stored as integer numerators over one
/// common denominator so that all combinatorial solvers work in exact `u64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    numerators: Vec<u64>,
    denominator: u64,
}

impl WeightVector {
    pub fn unit(m: usize) -> Self {
        Self { numerators: vec![1; m], denominator: 1 }
    }

    pub fn from_integers(values: Vec<u64>) -> Self {
        Self { numerators: values, denominator: 1 }
    }

    pub fn from_ratios(values: &[Ratio<u64>]) -> Result<Self, GraphError> {
        let denominator = values.iter().fold(1u64, |acc, r| acc.lcm(r.denom()));
        let numerators = values
            .iter()
            .map(|r| {
                r.numer()
                    .checked_mul(denominator / r.denom())
                    .ok_or_else(|| GraphError::Weights("weight overflow".into()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { numerators, denominator })
    }

    /// Parses whitespace-separated nonnegative rationals such as `2`, `3/4`.
    pub fn parse(text: &str, m: usize) -> Result<Self, GraphError> {
        let values = text
            .split_whitespace()
            .map(|tok| {
                let bad = || GraphError::Weights(format!("cannot parse weight '{tok}'"));
                match tok.split_once('/') {
                    Some((p, q)) => {
                        let p: u64 = p.parse().map_err(|_| bad())?;
                        let q: u64 = q.parse().map_err(|_| bad())?;
                        if q == 0 {
                            return Err(bad());
                        }
                        Ok(Ratio::new(p, q))
                    }
                    None => Ok(Ratio::from_integer(tok.parse().map_err(|_| bad())?)),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != m {
            return Err(GraphError::Weights(format!("expected {m} weights, found {}", values.len())));
        }
        Self::from_ratios(&values)
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// Weights scaled by the common denominator.
    pub fn scaled(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn value_of(&self, scaled_total: u64) -> Ratio<u64> {
        Ratio::new(scaled_total, self.denominator)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.numerators.iter().map(|&p| p as f64 / self.denominator as f64).collect()
    }

    pub fn ratio(&self, i: usize) -> Ratio<u64> {
        Ratio::new(self.numerators[i], self.denominator)
    }

    /// Subvector at the given positions.
    pub fn select(&self, positions: &[usize]) -> WeightVector {
        WeightVector {
            numerators: positions.iter().map(|&i| self.numerators[i]).collect(),
            denominator: self.denominator,
        }
    }
}

/// Parses the ECG text format: `#` comments, a `p ecg <n> <m> <k>` header
/// and exactly `m` lines `e <u> <v> <c>`.
pub fn parse_ecg(text: &str) -> Result<EdgeColoredGraph, GraphError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let syntax = |message: &str| GraphError::Syntax { line, message: message.to_string() };
        let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(&format!("expected integer, got '{s}'")));
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(syntax("duplicate header"));
                }
                if toks.len() != 5 || toks[1] != "ecg" {
                    return Err(syntax("header must be 'p ecg <n> <m> <k>'"));
                }
                header = Some((num(toks[2])?, num(toks[3])?, num(toks[4])?));
            }
            "e" => {
                let Some((n, _, k)) = header else {
                    return Err(syntax("edge line before header"));
                };
                if toks.len() != 4 {
                    return Err(syntax("edge line must be 'e <u> <v> <c>'"));
                }
                let (u, v, c) = (num(toks[1])?, num(toks[2])?, num(toks[3])?);
                for w in [u, v] {
                    if w >= n {
                        return Err(GraphError::VertexOutOfRange { line, vertex: w, n });
                    }
                }
                if u == v {
                    return Err(GraphError::LoopEdge { line, vertex: u });
                }
                if c >= k {
                    return Err(GraphError::ColorOutOfRange { line, color: c, k });
                }
                edges.push(ColoredEdge { u, v, color: c });
                edge_lines.push(line);
            }
            other => return Err(syntax(&format!("unknown line type '{other}'"))),
        }
    }
    let Some((n, m, k)) = header else {
        return Err(GraphError::Syntax { line: 0, message: "missing 'p ecg' header".into() });
    };
    if edges.len() != m {
        return Err(GraphError::EdgeCount { expected: m, found: edges.len() });
    }
    EdgeColoredGraph::new(n, k, edges).map_err(|err| match err {
        GraphError::DuplicateEdge { line, u, v } => {
            GraphError::DuplicateEdge { line: edge_lines[line - 1], u, v }
        }
        other => other,
    })
}

/// Canonical ECG text for `g`; `parse_ecg(&emit_ecg(g)) == g`.
pub fn emit_ecg(g: &EdgeColoredGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p ecg {} {} {}", g.vertex_count(), g.edge_count(), g.color_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.u, e.v, e.color).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const C4_BI: &str = "# bichromatic C4\np ecg 4 4 2\ne 0 1 0\ne 1 2 1\ne 2 3 0\ne 3 0 1\n";

    #[test]
    fn parses_minimal_instance() {
        let g = parse_ecg("p ecg 2 1 1\ne 0 1 0\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.color_count(), 1);
    }

    #[test]
    fn parses_bichromatic_c4() {
        let g = parse_ecg(C4_BI).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.color_count(), 2);
        assert_eq!(g.class(0), &[0, 2]);
        assert_eq!(g.class(1), &[1, 3]);
    }

    #[test]
    fn rejects_loop() {
        let err = parse_ecg("p ecg 2 1 1\ne 0 0 0\n").unwrap_err();
        assert_eq!(err, GraphError::LoopEdge { line: 2, vertex: 0 });
    }

    #[test]
    fn rejects_duplicate_edge_with_its_line() {
        let err = parse_ecg("p ecg 3 2 1\n# c\ne 0 1 0\ne 1 0 0\n").unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { line: 4, u: 1, v: 0 });
    }

    #[test]
    fn rejects_bad_colors() {
        let err = parse_ecg("p ecg 2 1 1\ne 0 1 1\n").unwrap_err();
        assert!(matches!(err, GraphError::ColorOutOfRange { line: 2, color: 1, k: 1 }));
        let err = parse_ecg("p ecg 3 1 2\ne 0 1 1\n").unwrap_err();
        assert_eq!(err, GraphError::UnusedColor { color: 0 });
    }

    #[test]
    fn rejects_syntax_errors() {
        assert!(matches!(parse_ecg("p ecg 2 1\n"), Err(GraphError::Syntax { line: 1, .. })));
        assert!(matches!(parse_ecg("e 0 1 0\n"), Err(GraphError::Syntax { line: 1, .. })));
        assert!(matches!(parse_ecg("p ecg 2 1 1\ne 0 x 0\n"), Err(GraphError::Syntax { line: 2, .. })));
        assert!(matches!(parse_ecg("p ecg 2 2 1\ne 0 1 0\n"), Err(GraphError::EdgeCount { .. })));
    }

    #[test]
    fn round_trips_small_instances() {
        for text in ["p ecg 2 1 1\ne 0 1 0\n", C4_BI] {
            let g = parse_ecg(text).unwrap();
            assert_eq!(parse_ecg(&emit_ecg(&g)).unwrap(), g);
        }
    }

    #[test]
    fn color_classes_partition_edges() {
        let g = parse_ecg(C4_BI).unwrap();
        let total: usize = g.classes().iter().map(Vec::len).sum();
        assert_eq!(total, g.edge_count());
    }

    #[test]
    fn delete_colors_renumbers() {
        let g = EdgeColoredGraph::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 2)]).unwrap();
        let (r, edge_map, colors) = g.delete_colors(&[1]);
        assert_eq!(edge_map, vec![0, 2]);
        assert_eq!(colors, vec![0, 2]);
        assert_eq!(r.edge(1).color, 1);
    }

    #[test]
    fn weights_parse_to_common_denominator() {
        let w = WeightVector::parse("1 3/2 1/3", 3).unwrap();
        assert_eq!(w.denominator(), 6);
        assert_eq!(w.scaled(), &[6, 9, 2]);
        assert!(WeightVector::parse("1 2", 3).is_err());
        assert!(WeightVector::parse("1/0", 1).is_err());
    }

    #[test]
    fn plain_graph_basics() {
        let g = PlainGraph::cycle(5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.adjacent(0, 4));
        assert!(!g.adjacent(0, 2));
        let p = g.induced(&[0, 1, 2]);
        assert_eq!(p.edge_count(), 2);
        assert!(PlainGraph::from_edges(2, &[(0, 0)]).is_err());
        assert!(PlainGraph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
    }
}
