//! Conflict graph, color-intersection graph and block-cut trees.
//!
//! The conflict graph `H` has one vertex per edge of `G`; two vertices are
//! adjacent when the edges share an endpoint or a color. The
//! color-intersection graph `Γ` has one vertex per color; two colors are
//! adjacent when some edges of those colors share an endpoint. Articulation
//! colors of `Γ` give clique cutsets of `H`, which is what the block-local
//! checks in this module verify.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeColoredGraph, PlainGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("color {color} is out of range (k = {k})")]
    ColorOutOfRange { color: usize, k: usize },
    #[error("color {0} is not an articulation color")]
    NotArticulation(usize),
}

/// Sorted set of color ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ColorSet(Vec<usize>);

impl ColorSet {
    pub fn new(mut colors: Vec<usize>) -> Self {
        colors.sort_unstable();
        colors.dedup();
        Self(colors)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn all(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn union(&self, other: &ColorSet) -> ColorSet {
        ColorSet::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn intersect(&self, colors: &[usize]) -> ColorSet {
        ColorSet::new(colors.iter().copied().filter(|&c| self.contains(c)).collect())
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    fn mask(&self, k: usize) -> Vec<bool> {
        let mut m = vec![false; k];
        for &c in &self.0 {
            m[c] = true;
        }
        m
    }
}

impl From<Vec<usize>> for ColorSet {
    fn from(v: Vec<usize>) -> Self {
        ColorSet::new(v)
    }
}

/// Conflict (augmented) graph of an edge-colored instance, or an induced
/// subgraph of one. Vertex `i` stands for edge `origin[i]` of the instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictGraph {
    pub graph: PlainGraph,
    pub color_of: Vec<usize>,
    pub endpoints: Vec<(usize, usize)>,
    pub origin: Vec<usize>,
    pub color_count: usize,
}

impl ConflictGraph {
    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    /// Induced subgraph on `vertices` (indices into this graph).
    pub fn induced(&self, vertices: &[usize]) -> ConflictGraph {
        ConflictGraph {
            graph: self.graph.induced(vertices),
            color_of: vertices.iter().map(|&v| self.color_of[v]).collect(),
            endpoints: vertices.iter().map(|&v| self.endpoints[v]).collect(),
            origin: vertices.iter().map(|&v| self.origin[v]).collect(),
            color_count: self.color_count,
        }
    }

    /// Vertices (local indices) whose color satisfies `pred`.
    pub fn vertices_where(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| pred(self.color_of[v])).collect()
    }
}

/// Builds `H`: vertex `i` is edge `i`; adjacency is shared endpoint or equal color.
pub fn build_conflict(g: &EdgeColoredGraph) -> ConflictGraph {
    let m = g.edge_count();
    let mut graph = PlainGraph::new(m);
    let edges = g.edges();
    for i in 0..m {
        for j in i + 1..m {
            if edges[i].color == edges[j].color || edges[i].shares_endpoint(&edges[j]) {
                graph.add_edge(i, j).expect("fresh pair");
            }
        }
    }
    ConflictGraph {
        graph,
        color_of: edges.iter().map(|e| e.color).collect(),
        endpoints: edges.iter().map(|e| (e.u, e.v)).collect(),
        origin: (0..m).collect(),
        color_count: g.color_count(),
    }
}

/// `S(F)`: local indices of conflict vertices whose color lies in `f`.
pub fn deleted_vertices(h: &ConflictGraph, f: &ColorSet) -> Vec<usize> {
    h.vertices_where(|c| f.contains(c))
}

/// `H − S(F)`.
pub fn residual(h: &ConflictGraph, f: &ColorSet) -> ConflictGraph {
    let keep = h.vertices_where(|c| !f.contains(c));
    h.induced(&keep)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorIntersectionGraph {
    pub graph: PlainGraph,
}

/// Builds `Γ`. A color meeting itself adds no loop.
pub fn build_gamma(g: &EdgeColoredGraph) -> ColorIntersectionGraph {
    let k = g.color_count();
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        at_vertex[e.u].push(e.color);
        at_vertex[e.v].push(e.color);
    }
    let mut graph = PlainGraph::new(k);
    for colors in &mut at_vertex {
        colors.sort_unstable();
        colors.dedup();
        for (i, &a) in colors.iter().enumerate() {
            for &b in &colors[i + 1..] {
                if !graph.adjacent(a, b) {
                    graph.add_edge(a, b).expect("fresh pair");
                }
            }
        }
    }
    ColorIntersectionGraph { graph }
}

/// Blocks of `Γ` with their block-cut tree, rooted per connected component
/// at the block containing the component's smallest color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCutTree {
    /// Sorted color sets, ordered lexicographically.
    pub blocks: Vec<Vec<usize>>,
    pub articulation_colors: Vec<usize>,
    /// Block ids containing each color.
    pub blocks_of_color: Vec<Vec<usize>>,
    /// Tree edges `(block, articulation color)`.
    pub tree_edges: Vec<(usize, usize)>,
    /// Root block of each connected component, ascending by smallest color.
    pub roots: Vec<usize>,
    pub parent_articulation: Vec<Option<usize>>,
    pub child_articulations: Vec<Vec<usize>>,
    pub internal: Vec<Vec<usize>>,
    /// Child blocks of each color (empty unless the color is an articulation).
    pub child_blocks: Vec<Vec<usize>>,
    /// Blocks in a parent-before-child order.
    pub preorder: Vec<usize>,
}

impl BlockCutTree {
    pub fn is_articulation(&self, c: usize) -> bool {
        self.articulation_colors.binary_search(&c).is_ok()
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_root(&self, block: usize) -> bool {
        self.parent_articulation[block].is_none()
    }
}

/// Biconnected components of `graph` by one iterative depth-first traversal
/// with an explicit edge stack. Isolated vertices are singleton blocks.
pub fn biconnected_components(graph: &PlainGraph) -> Vec<Vec<usize>> {
    let n = graph.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        if graph.degree(root) == 0 {
            blocks.push(vec![root]);
            continue;
        }
        // (vertex, parent, next neighbor position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(frame) = stack.last_mut() {
            let (v, parent, pos) = *frame;
            let nbrs = graph.neighbors(v);
            if pos < nbrs.len() {
                frame.2 += 1;
                let w = nbrs[pos];
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut block = Vec::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            block.push(a);
                            block.push(b);
                            if (a, b) == (u, v) {
                                break;
                            }
                        }
                        block.sort_unstable();
                        block.dedup();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks.sort();
    blocks
}

/// Block-cut tree of `Γ` with per-block roles `p(B)`, `A(B)`, `I(B)`.
pub fn block_cut_tree(gamma: &ColorIntersectionGraph) -> BlockCutTree {
    let k = gamma.graph.n();
    let blocks = biconnected_components(&gamma.graph);
    let mut blocks_of_color = vec![Vec::new(); k];
    for (b, block) in blocks.iter().enumerate() {
        for &c in block {
            blocks_of_color[c].push(b);
        }
    }
    let articulation_colors: Vec<usize> =
        (0..k).filter(|&c| blocks_of_color[c].len() >= 2).collect();
    let mut tree_edges = Vec::new();
    for &a in &articulation_colors {
        for &b in &blocks_of_color[a] {
            tree_edges.push((b, a));
        }
    }
    tree_edges.sort_unstable();

    let nb = blocks.len();
    let mut parent_articulation = vec![None; nb];
    let mut child_articulations = vec![Vec::new(); nb];
    let mut child_blocks = vec![Vec::new(); k];
    let mut visited_block = vec![false; nb];
    let mut visited_art = vec![false; k];
    let mut roots = Vec::new();
    let mut preorder = Vec::new();

    // Blocks are sorted lexicographically, so scanning colors ascending and
    // taking the first block of each unvisited color yields the root rule.
    for c in 0..k {
        let Some(&root) = blocks_of_color[c].first() else { continue };
        if visited_block[root] {
            continue;
        }
        roots.push(root);
        visited_block[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            preorder.push(b);
            for &a in &blocks[b] {
                if blocks_of_color[a].len() < 2 || visited_art[a] {
                    continue;
                }
                visited_art[a] = true;
                child_articulations[b].push(a);
                for &child in &blocks_of_color[a] {
                    if !visited_block[child] {
                        visited_block[child] = true;
                        parent_articulation[child] = Some(a);
                        child_blocks[a].push(child);
                        queue.push_back(child);
                    }
                }
            }
        }
    }
    let internal = (0..nb)
        .map(|b| {
            blocks[b]
                .iter()
                .copied()
                .filter(|&c| {
                    Some(c) != parent_articulation[b] && !child_articulations[b].contains(&c)
                })
                .collect()
        })
        .collect();

    BlockCutTree {
        blocks,
        articulation_colors,
        blocks_of_color,
        tree_edges,
        roots,
        parent_articulation,
        child_articulations,
        internal,
        child_blocks,
        preorder,
    }
}

/// `H_B = H[E(B)]` for a set of colors `block`.
pub fn block_subgraph(h: &ConflictGraph, block: &[usize]) -> Result<ConflictGraph, StructureError> {
    if let Some(&c) = block.iter().find(|&&c| c >= h.color_count) {
        return Err(StructureError::ColorOutOfRange { color: c, k: h.color_count });
    }
    let set = ColorSet::new(block.to_vec());
    Ok(h.induced(&h.vertices_where(|c| set.contains(c))))
}

/// Outcome of checking that an articulation color's class is a clique cutset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArticulationReport {
    pub color: usize,
    /// Color sets of the components of `Γ − c`.
    pub components: Vec<Vec<usize>>,
    /// Conflict vertices `W_i` of each component.
    pub parts: Vec<Vec<usize>>,
    pub class_is_clique: bool,
    /// An `H` edge joining two different parts, if one exists.
    pub crossing_edge: Option<(usize, usize)>,
}

impl ArticulationReport {
    pub fn passed(&self) -> bool {
        self.class_is_clique && self.crossing_edge.is_none()
    }
}

/// Checks that `E_c` is a clique of `H` separating the `W_i`.
pub fn verify_articulation_cutset(
    h: &ConflictGraph,
    gamma: &ColorIntersectionGraph,
    c: usize,
) -> Result<ArticulationReport, StructureError> {
    let k = gamma.graph.n();
    if c >= k {
        return Err(StructureError::ColorOutOfRange { color: c, k });
    }
    let (rest, kept) = gamma.graph.without(&[c]);
    let components: Vec<Vec<usize>> = rest
        .components()
        .into_iter()
        .map(|comp| comp.into_iter().map(|i| kept[i]).collect())
        .collect();
    if components.len() <= gamma.graph.components().len() {
        return Err(StructureError::NotArticulation(c));
    }
    let mut part_of_color = vec![usize::MAX; k];
    for (i, comp) in components.iter().enumerate() {
        for &col in comp {
            part_of_color[col] = i;
        }
    }
    let mut parts = vec![Vec::new(); components.len()];
    for v in 0..h.vertex_count() {
        if h.color_of[v] != c {
            parts[part_of_color[h.color_of[v]]].push(v);
        }
    }
    let class = h.vertices_where(|col| col == c);
    let class_is_clique = h.graph.is_clique(&class);
    let crossing_edge = h.graph.edges().find(|&(u, v)| {
        let (cu, cv) = (h.color_of[u], h.color_of[v]);
        cu != c && cv != c && part_of_color[cu] != part_of_color[cv]
    });
    Ok(ArticulationReport { color: c, components, parts, class_is_clique, crossing_edge })
}

/// Result of reassembling `H` from its block subgraphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueSumReport {
    pub vertices_covered: bool,
    pub edges_match: bool,
    /// Every pairwise overlap of block subgraphs is the class of a shared
    /// articulation color (or empty).
    pub overlaps_are_articulation_classes: bool,
}

impl CliqueSumReport {
    pub fn passed(&self) -> bool {
        self.vertices_covered && self.edges_match && self.overlaps_are_articulation_classes
    }
}

/// Glues the block subgraphs `H_B` back together on shared vertices and
/// compares the result with `H`.
pub fn verify_clique_sum(h: &ConflictGraph, bct: &BlockCutTree) -> CliqueSumReport {
    let n = h.vertex_count();
    let pieces: Vec<ConflictGraph> = bct
        .blocks
        .iter()
        .map(|b| block_subgraph(h, b).expect("blocks hold valid colors"))
        .collect();
    let mut covered = vec![false; n];
    let mut glued = PlainGraph::new(n);
    for piece in &pieces {
        for &v in &piece.origin {
            covered[v] = true;
        }
        for (a, b) in piece.graph.edges() {
            let (u, v) = (piece.origin[a], piece.origin[b]);
            if !glued.adjacent(u, v) {
                glued.add_edge(u, v).expect("fresh edge");
            }
        }
    }
    let vertices_covered = covered.iter().all(|&x| x);
    let edges_match = glued.edges().eq(h.graph.edges());

    let mut overlaps_ok = true;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let shared_colors: Vec<usize> = bct.blocks[i]
                .iter()
                .copied()
                .filter(|c| bct.blocks[j].binary_search(c).is_ok())
                .collect();
            if shared_colors.len() > 1
                || shared_colors.iter().any(|&c| !bct.is_articulation(c))
            {
                overlaps_ok = false;
                continue;
            }
            let overlap: Vec<usize> = pieces[i]
                .origin
                .iter()
                .copied()
                .filter(|v| pieces[j].origin.binary_search(v).is_ok())
                .collect();
            let expected: Vec<usize> = match shared_colors.first() {
                Some(&c) => h.vertices_where(|col| col == c).iter().map(|&v| h.origin[v]).collect(),
                None => Vec::new(),
            };
            if overlap != expected || !h.graph.is_clique(&overlap) {
                overlaps_ok = false;
            }
        }
    }
    CliqueSumReport {
        vertices_covered,
        edges_match,
        overlaps_are_articulation_classes: overlaps_ok,
    }
}

/// Checks that every block of `Γ − F` lies inside some block of `Γ`.
pub fn blocks_inherited(gamma: &ColorIntersectionGraph, f: &ColorSet) -> bool {
    let k = gamma.graph.n();
    let original = biconnected_components(&gamma.graph);
    let deleted = f.mask(k);
    let kept: Vec<usize> = (0..k).filter(|&c| !deleted[c]).collect();
    let sub = gamma.graph.induced(&kept);
    biconnected_components(&sub).iter().all(|block| {
        let colors: Vec<usize> = block.iter().map(|&i| kept[i]).collect();
        original
            .iter()
            .any(|ob| colors.iter().all(|c| ob.binary_search(c).is_ok()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{gen_bichromatic_cycle, gen_rainbow_cycle};

    fn same_graph(a: &PlainGraph, b: &PlainGraph) -> bool {
        a.n() == b.n() && a.edges().eq(b.edges())
    }

    #[test]
    fn bichromatic_c4_conflict_is_k4() {
        let h = build_conflict(&gen_bichromatic_cycle(4).unwrap());
        assert!(same_graph(&h.graph, &PlainGraph::complete(4)));
    }

    #[test]
    fn rainbow_c5_conflict_is_c5() {
        let h = build_conflict(&gen_rainbow_cycle(5).unwrap());
        assert!(same_graph(&h.graph, &PlainGraph::cycle(5)));
    }

    #[test]
    fn single_edge_conflict() {
        let g = EdgeColoredGraph::from_triples(2, &[(0, 1, 0)]).unwrap();
        let h = build_conflict(&g);
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.graph.edge_count(), 0);
    }

    #[test]
    fn deleted_vertex_sets() {
        let c5 = build_conflict(&gen_rainbow_cycle(5).unwrap());
        assert!(deleted_vertices(&c5, &ColorSet::empty()).is_empty());
        assert_eq!(deleted_vertices(&c5, &ColorSet::new(vec![0])), vec![0]);
        let c4 = build_conflict(&gen_bichromatic_cycle(4).unwrap());
        assert_eq!(deleted_vertices(&c4, &ColorSet::new(vec![0])), vec![0, 2]);
    }

    #[test]
    fn residual_of_c5_is_p4() {
        let h = build_conflict(&gen_rainbow_cycle(5).unwrap());
        let r = residual(&h, &ColorSet::new(vec![0]));
        assert_eq!(r.origin, vec![1, 2, 3, 4]);
        assert!(same_graph(&r.graph, &PlainGraph::path(4)));
        assert_eq!(residual(&h, &ColorSet::empty()), h);
        assert_eq!(residual(&h, &ColorSet::all(5)).vertex_count(), 0);
    }

    #[test]
    fn gamma_examples() {
        let g = build_gamma(&gen_bichromatic_cycle(4).unwrap());
        assert!(same_graph(&g.graph, &PlainGraph::complete(2)));
        let g = build_gamma(&gen_rainbow_cycle(5).unwrap());
        assert!(same_graph(&g.graph, &PlainGraph::cycle(5)));
        let two = EdgeColoredGraph::from_triples(4, &[(0, 1, 0), (2, 3, 1)]).unwrap();
        assert_eq!(build_gamma(&two).graph.edge_count(), 0);
    }

    #[test]
    fn block_cut_tree_two_triangles() {
        let gamma = ColorIntersectionGraph {
            graph: PlainGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
                .unwrap(),
        };
        let bct = block_cut_tree(&gamma);
        assert_eq!(bct.blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(bct.articulation_colors, vec![2]);
        assert_eq!(bct.roots, vec![0]);
        assert_eq!(bct.child_articulations[0], vec![2]);
        assert_eq!(bct.internal[0], vec![0, 1]);
        assert_eq!(bct.parent_articulation[1], Some(2));
        assert_eq!(bct.internal[1], vec![3, 4]);
        assert_eq!(bct.child_blocks[2], vec![1]);
    }

    #[test]
    fn block_cut_tree_path_and_cycle() {
        let path = ColorIntersectionGraph { graph: PlainGraph::path(3) };
        let bct = block_cut_tree(&path);
        assert_eq!(bct.blocks, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(bct.articulation_colors, vec![1]);

        let c5 = build_gamma(&gen_rainbow_cycle(5).unwrap());
        let bct = block_cut_tree(&c5);
        assert_eq!(bct.blocks, vec![vec![0, 1, 2, 3, 4]]);
        assert!(bct.articulation_colors.is_empty());
    }

    #[test]
    fn isolated_colors_are_singleton_blocks() {
        let gamma = ColorIntersectionGraph { graph: PlainGraph::new(2) };
        let bct = block_cut_tree(&gamma);
        assert_eq!(bct.blocks, vec![vec![0], vec![1]]);
        assert!(bct.articulation_colors.is_empty());
        assert_eq!(bct.roots, vec![0, 1]);
    }

    #[test]
    fn block_subgraph_examples() {
        let h = build_conflict(&gen_rainbow_cycle(5).unwrap());
        assert_eq!(block_subgraph(&h, &[0, 1, 2, 3, 4]).unwrap(), h);
        assert_eq!(block_subgraph(&h, &[]).unwrap().vertex_count(), 0);
        assert!(block_subgraph(&h, &[7]).is_err());
    }

    /// Two triangles in Γ sharing color 2; color 2 has two edges, one in each side.
    fn two_triangle_instance() -> EdgeColoredGraph {
        EdgeColoredGraph::from_triples(
            8,
            &[(0, 1, 0), (1, 2, 1), (2, 0, 2), (4, 5, 2), (5, 6, 3), (6, 4, 4)],
        )
        .unwrap()
    }

    #[test]
    fn two_block_subgraphs_overlap_on_shared_class() {
        let g = two_triangle_instance();
        let h = build_conflict(&g);
        let bct = block_cut_tree(&build_gamma(&g));
        assert_eq!(bct.blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        let a = block_subgraph(&h, &bct.blocks[0]).unwrap();
        let b = block_subgraph(&h, &bct.blocks[1]).unwrap();
        let overlap: Vec<usize> =
            a.origin.iter().copied().filter(|v| b.origin.contains(v)).collect();
        assert_eq!(overlap, g.class(2));
        assert!(verify_clique_sum(&h, &bct).passed());
    }

    #[test]
    fn articulation_cutset_on_path_instance() {
        // Γ = a–c–b with c in the middle: two stars joined through color c.
        let g = EdgeColoredGraph::from_triples(
            6,
            &[(0, 1, 0), (0, 2, 0), (1, 3, 2), (4, 5, 2), (4, 3, 1)],
        )
        .unwrap();
        let gamma = build_gamma(&g);
        assert!(same_graph(
            &gamma.graph,
            &PlainGraph::from_edges(3, &[(0, 2), (1, 2)]).unwrap()
        ));
        let report = verify_articulation_cutset(&build_conflict(&g), &gamma, 2).unwrap();
        assert!(report.passed());
        assert_eq!(report.components, vec![vec![0], vec![1]]);
    }

    #[test]
    fn articulation_precondition() {
        let g = gen_rainbow_cycle(5).unwrap();
        let err = verify_articulation_cutset(&build_conflict(&g), &build_gamma(&g), 0).unwrap_err();
        assert_eq!(err, StructureError::NotArticulation(0));
    }
}
