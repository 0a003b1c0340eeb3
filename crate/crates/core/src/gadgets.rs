//! Instance generators: the Vertex Cover reduction and seeded families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{ColoredEdge, EdgeColoredGraph, PlainGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn invalid(msg: impl Into<String>) -> GadgetError {
    GadgetError::InvalidParameter(msg.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcInstance {
    pub graph: PlainGraph,
    pub budget: usize,
}

/// Parses `p vc <n> <m>` followed by `m` lines `e <u> <v>`.
pub fn parse_vc(text: &str) -> Result<PlainGraph, GadgetError> {
    let mut graph: Option<(PlainGraph, usize)> = None;
    let mut seen = 0usize;
    let mut last = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |m: String| GadgetError::Parse { line, message: m };
        let toks: Vec<&str> = t.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected integer, got '{s}'")));
        match (toks[0], graph.as_mut()) {
            ("p", None) if toks.len() == 4 && toks[1] == "vc" => {
                graph = Some((PlainGraph::new(num(toks[2])?), num(toks[3])?));
            }
            ("e", Some((g, m))) if toks.len() == 3 => {
                if seen == *m {
                    return Err(err(format!("more than {m} edges")));
                }
                g.add_edge(num(toks[1])?, num(toks[2])?).map_err(|e| err(e.to_string()))?;
                seen += 1;
            }
            ("e", None) => return Err(err("edge before 'p vc' header".into())),
            _ => return Err(err("expected 'p vc <n> <m>' or 'e <u> <v>'".into())),
        }
    }
    let Some((g, m)) = graph else {
        return Err(GadgetError::Parse { line: last, message: "missing 'p vc' header".into() });
    };
    if seen != m {
        return Err(GadgetError::Parse { line: last, message: format!("expected {m} edges, found {seen}") });
    }
    Ok(g)
}

/// Minimum vertex cover size by exhaustive search (n <= 20).
pub fn min_vertex_cover(g: &PlainGraph) -> usize {
    let n = g.n();
    assert!(n <= 20, "exhaustive vertex cover needs n <= 20");
    let edges: Vec<(usize, usize)> = g.edges().collect();
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1))
        .map(u32::count_ones)
        .min()
        .unwrap_or(0) as usize
}

/// One 4-cycle gadget for VC edge `vc_edge` and copy `copy`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub vc_edge: (usize, usize),
    pub copy: usize,
    /// `x^1..x^4`.
    pub vertices: [usize; 4],
    /// Edge indices of `x1x2, x2x3, x3x4, x4x1`.
    pub edges: [usize; 4],
    pub alpha: usize,
    pub beta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetMap {
    /// Public color of each VC vertex; `None` for isolated vertices.
    pub public_color: Vec<Option<usize>>,
    pub gadgets: Vec<Gadget>,
    pub copies: usize,
}

impl GadgetMap {
    pub fn gadget(&self, edge_index: usize, copy: usize) -> &Gadget {
        &self.gadgets[edge_index * self.copies + copy]
    }

    pub fn public_colors(&self) -> Vec<usize> {
        self.public_color.iter().flatten().copied().collect()
    }
}

/// Builds `K + 1` disjoint colored 4-cycles per VC edge `{u, v}`, colored
/// cyclically `u, α, v, β`. Isolated VC vertices get no public color.
pub fn vc_reduce(vc: &VcInstance) -> (EdgeColoredGraph, GadgetMap) {
    let g = &vc.graph;
    let copies = vc.budget + 1;
    let mut public_color = vec![None; g.n()];
    let mut next = 0usize;
    for (v, slot) in public_color.iter_mut().enumerate() {
        if g.degree(v) > 0 {
            *slot = Some(next);
            next += 1;
        }
    }
    let vc_edges: Vec<(usize, usize)> = g.edges().collect();
    let mut edges = Vec::with_capacity(4 * copies * vc_edges.len());
    let mut gadgets = Vec::with_capacity(copies * vc_edges.len());
    for &(u, v) in &vc_edges {
        for copy in 0..copies {
            let base = 4 * gadgets.len();
            let x = [base, base + 1, base + 2, base + 3];
            let (alpha, beta) = (next, next + 1);
            next += 2;
            let colors = [public_color[u].unwrap(), alpha, public_color[v].unwrap(), beta];
            let first = edges.len();
            for j in 0..4 {
                edges.push(ColoredEdge { u: x[j], v: x[(j + 1) % 4], color: colors[j] });
            }
            gadgets.push(Gadget {
                vc_edge: (u, v),
                copy,
                vertices: x,
                edges: [first, first + 1, first + 2, first + 3],
                alpha,
                beta,
            });
        }
    }
    let graph = EdgeColoredGraph::new(4 * gadgets.len(), next, edges).expect("gadget construction is valid");
    (graph, GadgetMap { public_color, gadgets, copies })
}

/// Rainbow `C_n`: edge `i` joins `i` and `i+1 mod n` with color `i`.
pub fn gen_rainbow_cycle(n: usize) -> Result<EdgeColoredGraph, GadgetError> {
    if n < 3 {
        return Err(invalid(format!("cycle length {n} must be at least 3")));
    }
    let triples: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, i)).collect();
    Ok(EdgeColoredGraph::from_triples(n, &triples).expect("valid cycle"))
}

/// `C_n` with colors alternating 0, 1.
pub fn gen_bichromatic_cycle(n: usize) -> Result<EdgeColoredGraph, GadgetError> {
    if n < 4 || n % 2 == 1 {
        return Err(invalid(format!("bichromatic cycle length {n} must be even and at least 4")));
    }
    let triples: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, i % 2)).collect();
    Ok(EdgeColoredGraph::from_triples(n, &triples).expect("valid cycle"))
}

const MAX_COLOR_RESAMPLES: usize = 1_000_000;

/// `m` distinct uniform edges on `n` vertices with uniform colors in `0..k`;
/// colorings that miss a color are resampled.
pub fn gen_random(n: usize, m: usize, k: usize, seed: u64) -> Result<EdgeColoredGraph, GadgetError> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    if m > pairs.len() {
        return Err(invalid(format!("{m} edges do not fit on {n} vertices")));
    }
    if k > m || (k == 0 && m > 0) {
        return Err(invalid(format!("{k} colors cannot all be used on {m} edges")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<(usize, usize)> = pairs.choose_multiple(&mut rng, m).copied().collect();
    chosen.sort_unstable();
    for _ in 0..MAX_COLOR_RESAMPLES {
        let colors: Vec<usize> = (0..m).map(|_| rng.gen_range(0..k)).collect();
        let mut used = vec![false; k];
        colors.iter().for_each(|&c| used[c] = true);
        if used.iter().all(|&u| u) {
            let triples: Vec<_> = chosen.iter().zip(&colors).map(|(&(u, v), &c)| (u, v, c)).collect();
            return EdgeColoredGraph::new(
                n,
                k,
                triples.into_iter().map(|(u, v, color)| ColoredEdge { u, v, color }).collect(),
            )
            .map_err(|e| invalid(e.to_string()));
        }
    }
    Err(invalid(format!("no coloring using all {k} colors found for {m} edges")))
}

/// A chain of `blocks` color groups. Each group is a rainbow cycle (or a
/// two-edge path when the group has 2 colors) on fresh vertices, possibly
/// with chords colored inside the group; consecutive groups share exactly
/// one color. Every block of `Γ` then has at most `b` colors.
pub fn gen_bounded_block(b: usize, blocks: usize, seed: u64) -> Result<EdgeColoredGraph, GadgetError> {
    if b < 2 {
        return Err(invalid(format!("block bound {b} must be at least 2")));
    }
    if blocks == 0 {
        return Err(invalid("at least one block is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<ColoredEdge> = Vec::new();
    let mut next_vertex = 0usize;
    let mut next_color = 0usize;
    let mut previous: Vec<usize> = Vec::new();
    for _ in 0..blocks {
        let size = rng.gen_range(2..=b);
        let mut colors = Vec::with_capacity(size);
        if let Some(&shared) = previous.choose(&mut rng) {
            colors.push(shared);
        }
        while colors.len() < size {
            colors.push(next_color);
            next_color += 1;
        }
        colors.shuffle(&mut rng);
        let vs: Vec<usize> = (next_vertex..next_vertex + size.max(3)).collect();
        next_vertex += vs.len();
        if size == 2 {
            edges.push(ColoredEdge { u: vs[0], v: vs[1], color: colors[0] });
            edges.push(ColoredEdge { u: vs[1], v: vs[2], color: colors[1] });
        } else {
            for i in 0..size {
                edges.push(ColoredEdge { u: vs[i], v: vs[(i + 1) % size], color: colors[i] });
            }
            for i in 0..size {
                for j in i + 2..size {
                    if (i, j) != (0, size - 1) && rng.gen_bool(0.25) {
                        let color = *colors.choose(&mut rng).unwrap();
                        edges.push(ColoredEdge { u: vs[i], v: vs[j], color });
                    }
                }
            }
        }
        previous = colors;
    }
    EdgeColoredGraph::new(next_vertex, next_color, edges).map_err(|e| invalid(e.to_string()))
}
