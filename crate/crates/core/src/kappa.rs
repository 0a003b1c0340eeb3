//! The grouped color-deletion number κ: brute force, block-cut-tree DP and
//! hitting-set branching.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::conflict::{block_cut_tree, build_conflict, build_gamma, residual, ColorSet};
use crate::graph::{EdgeColoredGraph, PlainGraph};
use crate::recognition::{
    finite_family_member, for_each_combination, induced_copies, ClassOracle, RecognitionError, TargetClass,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("no deletion set of at most {cap} colors reaches the target class")]
    CapExceeded { cap: usize },
    #[error("block with {found} colors exceeds the block bound {bound}")]
    BlockBoundExceeded { bound: usize, found: usize },
    #[error("target class '{0}' is not clique-sum local")]
    NotCliqueSumLocal(String),
    #[error(transparent)]
    Recognition(#[from] RecognitionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMethod {
    Brute,
    Dp,
    Fpt,
}

/// Colors deleted inside one block of `Γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockWitness {
    pub block: Vec<usize>,
    pub deleted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeletionCertificate {
    pub kappa: usize,
    pub colors: Vec<usize>,
    pub target: TargetClass,
    pub method: KappaMethod,
    /// Residual membership re-checked after the engine returned.
    pub verified: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockWitness>,
}

fn residual_member(g: &EdgeColoredGraph, oracle: &ClassOracle, colors: &[usize]) -> bool {
    let h = build_conflict(g);
    oracle.is_member(&residual(&h, &ColorSet::new(colors.to_vec())).graph)
}

/// Smallest deletion set in (size, lexicographic) order among sets of at most `cap` colors.
pub fn kappa_bruteforce(
    g: &EdgeColoredGraph,
    oracle: &ClassOracle,
    cap: usize,
) -> Result<DeletionCertificate, KappaError> {
    let h = build_conflict(g);
    let k = g.color_count();
    for size in 0..=cap.min(k) {
        let mut found = None;
        for_each_combination(k, size, |subset| {
            let r = residual(&h, &ColorSet::new(subset.to_vec()));
            if oracle.is_member(&r.graph) {
                found = Some(subset.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(colors) = found {
            return Ok(DeletionCertificate {
                kappa: size,
                colors,
                target: oracle.class(),
                method: KappaMethod::Brute,
                verified: true,
                blocks: Vec::new(),
            });
        }
    }
    Err(KappaError::CapExceeded { cap })
}

/// Sums per-component certificates over the connected components of `Γ`.
/// `engine` sees each component with its colors renumbered ascending.
pub fn kappa_components<E>(
    g: &EdgeColoredGraph,
    oracle: &ClassOracle,
    method: KappaMethod,
    engine: E,
) -> Result<DeletionCertificate, KappaError>
where
    E: Fn(&EdgeColoredGraph, &ClassOracle) -> Result<DeletionCertificate, KappaError>,
{
    let gamma = build_gamma(g);
    let mut colors = Vec::new();
    let mut blocks = Vec::new();
    for component in gamma.graph.components() {
        let (sub, _) = g.restrict_to_colors(&component);
        let cert = engine(&sub, oracle)?;
        colors.extend(cert.colors.iter().map(|&c| component[c]));
        blocks.extend(cert.blocks.into_iter().map(|w| BlockWitness {
            block: w.block.iter().map(|&c| component[c]).collect(),
            deleted: w.deleted.iter().map(|&c| component[c]).collect(),
        }));
    }
    colors.sort_unstable();
    let verified = residual_member(g, oracle, &colors);
    Ok(DeletionCertificate { kappa: colors.len(), colors, target: oracle.class(), method, verified, blocks })
}

const INF: u32 = u32::MAX;

/// Index subsets of `0..n` ordered by size, then lexicographically.
fn ordered_subsets(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << n);
    for size in 0..=n {
        for_each_combination(n, size, |s| {
            out.push(s.iter().fold(0u64, |m, &i| m | 1 << i));
            true
        });
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Choice {
    value: u32,
    x: u64,
    y: u64,
}

struct BlockData {
    colors: Vec<usize>,
    graph: PlainGraph,
    /// Local color position of each vertex of `graph`.
    vertex_color: Vec<usize>,
    children: Vec<usize>,
    internal: Vec<usize>,
    parent: Option<usize>,
}

impl BlockData {
    fn position(&self, c: usize) -> usize {
        self.colors.binary_search(&c).expect("color in block")
    }

    fn residual_member(&self, oracle: &ClassOracle, deleted: u64, memo: &mut HashMap<u64, bool>) -> bool {
        *memo.entry(deleted).or_insert_with(|| {
            let keep: Vec<usize> =
                (0..self.graph.n()).filter(|&v| deleted >> self.vertex_color[v] & 1 == 0).collect();
            oracle.is_member(&self.graph.induced(&keep))
        })
    }
}

/// Block-cut-tree dynamic program for instances with connected `Γ`.
fn dp_connected(g: &EdgeColoredGraph, oracle: &ClassOracle) -> Result<DeletionCertificate, KappaError> {
    let h = build_conflict(g);
    let gamma = build_gamma(g);
    let bct = block_cut_tree(&gamma);
    let nb = bct.blocks.len();
    let data: Vec<BlockData> = (0..nb)
        .map(|b| {
            let colors = bct.blocks[b].clone();
            let vertices = h.vertices_where(|c| colors.binary_search(&c).is_ok());
            let sub = h.induced(&vertices);
            let vertex_color = sub.color_of.iter().map(|c| colors.binary_search(c).unwrap()).collect();
            BlockData {
                graph: sub.graph,
                vertex_color,
                children: bct.child_articulations[b].clone(),
                internal: bct.internal[b].clone(),
                parent: bct.parent_articulation[b],
                colors,
            }
        })
        .collect();

    let mut choice: Vec<[Option<Choice>; 2]> = vec![[None, None]; nb];
    let art_value = |a: usize, delta: usize, choice: &[[Option<Choice>; 2]]| -> u32 {
        bct.child_blocks[a]
            .iter()
            .fold(delta as u32, |acc, &c| acc.saturating_add(choice[c][delta].map_or(INF, |ch| ch.value)))
    };

    for &b in bct.preorder.iter().rev() {
        let d = &data[b];
        let mut memo = HashMap::new();
        let x_sets = ordered_subsets(d.children.len());
        let y_sets = ordered_subsets(d.internal.len());
        let deltas: &[usize] = if d.parent.is_some() { &[0, 1] } else { &[0] };
        let child_values: Vec<[u32; 2]> =
            d.children.iter().map(|&a| [art_value(a, 0, &choice), art_value(a, 1, &choice)]).collect();
        for &delta in deltas {
            let mut best = Choice { value: INF, x: 0, y: 0 };
            let parent_mask = match (delta, d.parent) {
                (1, Some(p)) => 1u64 << d.position(p),
                _ => 0,
            };
            for &x in &x_sets {
                let child_cost = child_values
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, v)| acc.saturating_add(v[(x >> i & 1) as usize]));
                if child_cost == INF {
                    continue;
                }
                let x_mask = d
                    .children
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| x >> i & 1 == 1)
                    .fold(0u64, |m, (_, &a)| m | 1 << d.position(a));
                for &y in &y_sets {
                    let value = child_cost.saturating_add(y.count_ones());
                    if value >= best.value {
                        continue;
                    }
                    let y_mask = d
                        .internal
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| y >> i & 1 == 1)
                        .fold(0u64, |m, (_, &c)| m | 1 << d.position(c));
                    if d.residual_member(oracle, parent_mask | x_mask | y_mask, &mut memo) {
                        best = Choice { value, x, y };
                    }
                }
            }
            if best.value != INF {
                choice[b][delta] = Some(best);
            }
        }
    }

    let root = bct.roots[0];
    let mut colors = Vec::new();
    let mut witnesses = vec![Vec::new(); nb];
    let mut stack = vec![(root, 0usize)];
    while let Some((b, delta)) = stack.pop() {
        let d = &data[b];
        let ch = choice[b][delta].expect("deleting every color is always feasible");
        if delta == 1 {
            witnesses[b].push(d.parent.unwrap());
        }
        for (i, &c) in d.internal.iter().enumerate() {
            if ch.y >> i & 1 == 1 {
                colors.push(c);
                witnesses[b].push(c);
            }
        }
        for (i, &a) in d.children.iter().enumerate() {
            let da = (ch.x >> i & 1) as usize;
            if da == 1 {
                colors.push(a);
                witnesses[b].push(a);
            }
            stack.extend(bct.child_blocks[a].iter().map(|&c| (c, da)));
        }
    }
    colors.sort_unstable();
    let kappa = choice[root][0].unwrap().value as usize;
    debug_assert_eq!(kappa, colors.len());
    let blocks = (0..nb)
        .map(|b| {
            let mut deleted = std::mem::take(&mut witnesses[b]);
            deleted.sort_unstable();
            BlockWitness { block: data[b].colors.clone(), deleted }
        })
        .collect();
    Ok(DeletionCertificate {
        kappa,
        colors,
        target: oracle.class(),
        method: KappaMethod::Dp,
        verified: false,
        blocks,
    })
}

/// Largest block size accepted by the DP; enumeration is `2^b` per block.
pub const MAX_DP_BLOCK: usize = 30;

/// κ via the block-cut-tree dynamic program, component by component.
pub fn kappa_dp(g: &EdgeColoredGraph, oracle: &ClassOracle, block_bound: usize) -> Result<DeletionCertificate, KappaError> {
    if !oracle.is_clique_sum_local() {
        return Err(KappaError::NotCliqueSumLocal(oracle.class().name().into()));
    }
    let bct = block_cut_tree(&build_gamma(g));
    let largest = bct.max_block_size();
    let bound = block_bound.min(MAX_DP_BLOCK);
    if largest > bound {
        return Err(KappaError::BlockBoundExceeded { bound, found: largest });
    }
    kappa_components(g, oracle, KappaMethod::Dp, dp_connected)
}

/// Color signatures of forbidden induced subgraphs of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HittingHypergraph {
    pub universe: usize,
    pub edges: Vec<Vec<usize>>,
    pub rank_bound: usize,
}

impl HittingHypergraph {
    pub fn build(g: &EdgeColoredGraph, family: &[PlainGraph]) -> Result<Self, KappaError> {
        let h = build_conflict(g);
        let copies = induced_copies(&h.graph, family)?;
        let mut edges: Vec<Vec<usize>> = copies
            .iter()
            .map(|u| {
                let mut cs: Vec<usize> = u.iter().map(|&v| h.color_of[v]).collect();
                cs.sort_unstable();
                cs.dedup();
                cs
            })
            .collect();
        edges.sort();
        edges.dedup();
        let rank_bound = family.iter().map(PlainGraph::n).max().unwrap_or(0);
        Ok(Self { universe: g.color_count(), edges, rank_bound })
    }

    pub fn is_hit_by(&self, f: &ColorSet) -> bool {
        self.edges.iter().all(|e| e.iter().any(|&c| f.contains(c)))
    }

    fn first_unhit(&self, chosen: &[usize]) -> Option<&[usize]> {
        self.edges
            .iter()
            .find(|e| !e.iter().any(|c| chosen.contains(c)))
            .map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FptStats {
    pub hyperedges: usize,
    pub nodes: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FptResult {
    /// `None` means no hitting set of size at most the budget exists.
    pub certificate: Option<DeletionCertificate>,
    pub stats: FptStats,
}

fn branch(hg: &HittingHypergraph, chosen: &mut Vec<usize>, left: usize, stats: &mut FptStats) -> bool {
    stats.nodes += 1;
    stats.max_depth = stats.max_depth.max(chosen.len());
    let Some(edge) = hg.first_unhit(chosen) else { return true };
    if left == 0 {
        return false;
    }
    for &c in edge {
        chosen.push(c);
        if branch(hg, chosen, left - 1, stats) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Smallest hitting set of size at most `budget` by iterative deepening
/// over bounded-degree branching on an unhit hyperedge.
pub fn kappa_fpt_hitting(g: &EdgeColoredGraph, family: &[PlainGraph], budget: usize) -> Result<FptResult, KappaError> {
    let hg = HittingHypergraph::build(g, family)?;
    let mut stats = FptStats { hyperedges: hg.edges.len(), ..FptStats::default() };
    for depth in 0..=budget {
        let mut chosen = Vec::new();
        if branch(&hg, &mut chosen, depth, &mut stats) {
            chosen.sort_unstable();
            let h = build_conflict(g);
            let r = residual(&h, &ColorSet::new(chosen.clone()));
            let (verified, _) = finite_family_member(&r.graph, family)?;
            return Ok(FptResult {
                certificate: Some(DeletionCertificate {
                    kappa: chosen.len(),
                    colors: chosen,
                    target: TargetClass::FiniteFamily,
                    method: KappaMethod::Fpt,
                    verified,
                    blocks: Vec::new(),
                }),
                stats,
            });
        }
    }
    Ok(FptResult { certificate: None, stats })
}

/// Runs `kappa_dp` and fills in `verified` by re-checking the residual.
pub fn kappa_dp_verified(
    g: &EdgeColoredGraph,
    oracle: &ClassOracle,
    block_bound: usize,
) -> Result<DeletionCertificate, KappaError> {
    let mut cert = kappa_dp(g, oracle, block_bound)?;
    cert.verified = residual_member(g, oracle, &cert.colors);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{gen_bichromatic_cycle, gen_rainbow_cycle};

    fn two_c5_sharing_color() -> EdgeColoredGraph {
        // Rainbow C5s on colors 0..5 and 6..11 joined by color 5, which
        // lies on neither hole.
        let mut triples: Vec<(usize, usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5, i)).collect();
        triples.extend((0..5).map(|i| (5 + i, 5 + (i + 1) % 5, 6 + i)));
        triples.push((0, 10, 5));
        triples.push((5, 11, 5));
        EdgeColoredGraph::from_triples(12, &triples).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let chordal = ClassOracle::chordal();
        let c5 = gen_rainbow_cycle(5).unwrap();
        assert_eq!(kappa_bruteforce(&c5, &chordal, 5).unwrap().colors, vec![0]);
        let c4 = gen_bichromatic_cycle(4).unwrap();
        assert_eq!(kappa_bruteforce(&c4, &chordal, 2).unwrap().kappa, 0);
        let r4 = gen_rainbow_cycle(4).unwrap();
        assert_eq!(kappa_bruteforce(&r4, &chordal, 4).unwrap().kappa, 1);
        assert_eq!(kappa_bruteforce(&r4, &chordal, 0), Err(KappaError::CapExceeded { cap: 0 }));
    }

    #[test]
    fn dp_examples() {
        let chordal = ClassOracle::chordal();
        let c5 = gen_rainbow_cycle(5).unwrap();
        let cert = kappa_dp_verified(&c5, &chordal, 5).unwrap();
        assert_eq!((cert.kappa, cert.verified), (1, true));
        let two = two_c5_sharing_color();
        assert_eq!(build_gamma(&two).graph.components().len(), 1);
        assert_eq!(block_cut_tree(&build_gamma(&two)).blocks.len(), 2);
        let cert = kappa_dp_verified(&two, &chordal, 6).unwrap();
        assert_eq!(cert.kappa, 2);
        assert!(cert.verified);
        assert_eq!(kappa_bruteforce(&two, &chordal, 11).unwrap().kappa, 2);
        let c4 = gen_bichromatic_cycle(4).unwrap();
        assert_eq!(kappa_dp_verified(&c4, &chordal, 2).unwrap().colors, Vec::<usize>::new());
    }

    #[test]
    fn dp_rejects_bad_input() {
        let c5 = gen_rainbow_cycle(5).unwrap();
        assert_eq!(
            kappa_dp(&c5, &ClassOracle::chordal(), 4),
            Err(KappaError::BlockBoundExceeded { bound: 4, found: 5 })
        );
        assert!(matches!(kappa_dp(&c5, &ClassOracle::cluster(), 5), Err(KappaError::NotCliqueSumLocal(_))));
    }

    #[test]
    fn components_add_up() {
        let mut triples: Vec<(usize, usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5, i)).collect();
        triples.extend((0..5).map(|i| (5 + i, 5 + (i + 1) % 5, 5 + i)));
        let g = EdgeColoredGraph::from_triples(10, &triples).unwrap();
        let chordal = ClassOracle::chordal();
        let cert = kappa_components(&g, &chordal, KappaMethod::Brute, |s, o| kappa_bruteforce(s, o, 10)).unwrap();
        assert_eq!(cert.colors, vec![0, 5]);
        assert!(cert.verified);
        let empty = EdgeColoredGraph::new(0, 0, Vec::new()).unwrap();
        assert_eq!(kappa_dp(&empty, &chordal, 3).unwrap().kappa, 0);
    }

    #[test]
    fn fpt_examples() {
        let c4 = vec![PlainGraph::cycle(4)];
        let r4 = gen_rainbow_cycle(4).unwrap();
        let yes = kappa_fpt_hitting(&r4, &c4, 1).unwrap();
        assert_eq!(yes.certificate.as_ref().unwrap().colors, vec![0]);
        assert!(yes.certificate.unwrap().verified);
        assert!(yes.stats.max_depth <= 1);
        assert_eq!(kappa_fpt_hitting(&r4, &c4, 0).unwrap().certificate, None);
        let p3 = EdgeColoredGraph::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 2)]).unwrap();
        let res = kappa_fpt_hitting(&p3, &[PlainGraph::path(3)], 1).unwrap();
        assert_eq!(res.stats.hyperedges, 1);
        assert_eq!(res.certificate.unwrap().kappa, 1);
        assert!(matches!(
            kappa_fpt_hitting(&p3, &[PlainGraph::cycle(9)], 1),
            Err(KappaError::Recognition(RecognitionError::ObstructionTooLarge(9)))
        ));
    }
}
