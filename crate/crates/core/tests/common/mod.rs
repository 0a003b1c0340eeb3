#![allow(dead_code)]

use rainbow_core::conflict::{
    blocks_inherited, block_cut_tree, build_conflict, build_gamma, residual, verify_articulation_cutset,
    verify_clique_sum, ColorSet,
};
use rainbow_core::graph::{ColoredEdge, EdgeColoredGraph, PlainGraph};
use rainbow_core::recognition::{blockwise_member, for_each_combination, ClassOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Disjoint union; vertices and colors of `b` are shifted past those of `a`.
pub fn disjoint_union(a: &EdgeColoredGraph, b: &EdgeColoredGraph) -> EdgeColoredGraph {
    let (n, k) = (a.vertex_count(), a.color_count());
    let mut edges: Vec<ColoredEdge> = a.edges().to_vec();
    edges.extend(b.edges().iter().map(|e| ColoredEdge { u: e.u + n, v: e.v + n, color: e.color + k }));
    EdgeColoredGraph::new(n + b.vertex_count(), k + b.color_count(), edges).unwrap()
}

/// Induced cycles of length at least 4, by subset enumeration.
pub fn holes(g: &PlainGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 4..=g.n() {
        for_each_combination(g.n(), size, |s| {
            let sub = g.induced(s);
            if (0..sub.n()).all(|v| sub.degree(v) == 2) && sub.is_connected() {
                out.push(s.to_vec());
            }
            true
        });
    }
    out
}

/// Random interval graph, which is chordal.
pub fn random_interval_graph(n: usize, seed: u64) -> PlainGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spans: Vec<(u32, u32)> = (0..n)
        .map(|_| {
            let a = rng.gen_range(0..30);
            (a, a + rng.gen_range(0..8))
        })
        .collect();
    let mut g = PlainGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if spans[i].0 <= spans[j].1 && spans[j].0 <= spans[i].1 {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

/// Outcome of the structural checks on one instance and deletion set.
#[derive(Debug, Default)]
pub struct StructuralOutcome {
    pub articulation: bool,
    pub clique_sum: bool,
    pub hole_locality: bool,
    pub residual_locality: bool,
    pub inheritance: bool,
    pub deletion_commutes: bool,
}

impl StructuralOutcome {
    pub fn all(&self) -> bool {
        self.articulation
            && self.clique_sum
            && self.hole_locality
            && self.residual_locality
            && self.inheritance
            && self.deletion_commutes
    }
}

pub fn structural_checks(g: &EdgeColoredGraph, f: &ColorSet) -> StructuralOutcome {
    let h = build_conflict(g);
    let gamma = build_gamma(g);
    let bct = block_cut_tree(&gamma);

    let articulation = bct
        .articulation_colors
        .iter()
        .all(|&c| verify_articulation_cutset(&h, &gamma, c).map(|r| r.passed()).unwrap_or(false));
    let clique_sum = verify_clique_sum(&h, &bct).passed();
    let hole_locality = holes(&h.graph).iter().all(|hole| {
        bct.blocks.iter().any(|b| hole.iter().all(|&v| b.binary_search(&h.color_of[v]).is_ok()))
    });
    let r = residual(&h, f);
    let residual_locality = [ClassOracle::chordal(), ClassOracle::bipartite()]
        .iter()
        .all(|o| blockwise_member(&h, &bct, f, o).map(|b| b == o.is_member(&r.graph)).unwrap_or(false));
    let inheritance = blocks_inherited(&gamma, f);
    let (deleted, _, _) = g.delete_colors(f.as_slice());
    let sorted = |g: &PlainGraph| {
        let mut e: Vec<(usize, usize)> = g.edges().collect();
        e.sort_unstable();
        (g.n(), e)
    };
    let deletion_commutes = sorted(&build_conflict(&deleted).graph) == sorted(&r.graph);
    StructuralOutcome { articulation, clique_sum, hole_locality, residual_locality, inheritance, deletion_commutes }
}
