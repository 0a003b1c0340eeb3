//! Exact maximum-weight rainbow matching.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::conflict::{build_conflict, ColorSet};
use crate::graph::{EdgeColoredGraph, PlainGraph, WeightVector};
use crate::recognition::{is_chordal, Chordality, HoleWitness};

/// Largest graph handled by exhaustive stable-set search.
pub const BRUTE_FORCE_LIMIT: usize = 24;
/// Largest branch space enumerated by the supplied-set solver.
pub const MAX_BRANCHES: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RmError {
    #[error("{0} vertices exceed the brute-force limit of {BRUTE_FORCE_LIMIT}")]
    TooLarge(usize),
    #[error("graph is not chordal; hole {0:?}")]
    NotChordal(Vec<usize>),
    #[error("residual conflict graph is not chordal; hole on edges {0:?}")]
    NonChordalResidual(Vec<usize>),
    #[error("residual with {0} vertices has no applicable exact solver")]
    Unsolvable(usize),
    #[error("weight vector has {found} entries for {expected} edges")]
    WeightLength { expected: usize, found: usize },
    #[error("color {color} out of range for {k} colors")]
    ColorOutOfRange { color: usize, k: usize },
    #[error("branch space of {0} assignments is too large")]
    TooManyBranches(u128),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RainbowMatching {
    pub edges: Vec<usize>,
    /// Value scaled by the weight denominator.
    pub scaled_value: u64,
    #[serde(serialize_with = "ratio_string")]
    pub value: Ratio<u64>,
}

fn ratio_string<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl RainbowMatching {
    fn new(edges: Vec<usize>, scaled_value: u64, w: &WeightVector) -> Self {
        Self { edges, scaled_value, value: w.value_of(scaled_value) }
    }

    pub fn value_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }

    pub fn verify(&self, g: &EdgeColoredGraph, w: &WeightVector) -> bool {
        g.is_rainbow_matching(&self.edges)
            && self.edges.iter().map(|&e| w.scaled()[e]).sum::<u64>() == self.scaled_value
    }
}

/// Maximum-weight stable set by exhaustive search; ties go to the
/// lexicographically smallest vertex list.
pub fn mwis_bruteforce(g: &PlainGraph, w: &[u64]) -> Result<(u64, Vec<usize>), RmError> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(RmError::TooLarge(n));
    }
    let masks = g.masks();
    let mut suffix = vec![0u64; n + 1];
    for v in (0..n).rev() {
        suffix[v] = suffix[v + 1] + w[v];
    }
    struct Search<'a> {
        masks: &'a [u64],
        w: &'a [u64],
        suffix: &'a [u64],
        best: Option<(u64, Vec<usize>)>,
    }
    impl Search<'_> {
        fn go(&mut self, v: usize, blocked: u64, value: u64, chosen: &mut Vec<usize>) {
            if let Some((b, _)) = &self.best {
                if value + self.suffix[v] < *b {
                    return;
                }
            }
            if v == self.w.len() {
                let better = match &self.best {
                    None => true,
                    Some((b, set)) => value > *b || (value == *b && chosen.as_slice() < set.as_slice()),
                };
                if better {
                    self.best = Some((value, chosen.clone()));
                }
                return;
            }
            if blocked >> v & 1 == 0 {
                chosen.push(v);
                self.go(v + 1, blocked | self.masks[v], value + self.w[v], chosen);
                chosen.pop();
            }
            self.go(v + 1, blocked, value, chosen);
        }
    }
    let mut s = Search { masks: &masks, w, suffix: &suffix, best: None };
    s.go(0, 0, 0, &mut Vec::new());
    Ok(s.best.unwrap())
}

fn check_weights(g: &EdgeColoredGraph, w: &WeightVector) -> Result<(), RmError> {
    if w.len() != g.edge_count() {
        return Err(RmError::WeightLength { expected: g.edge_count(), found: w.len() });
    }
    Ok(())
}

/// Optimal rainbow matching by stable-set enumeration in the conflict graph.
pub fn rm_bruteforce(g: &EdgeColoredGraph, w: &WeightVector) -> Result<RainbowMatching, RmError> {
    check_weights(g, w)?;
    let h = build_conflict(g);
    let (value, edges) = mwis_bruteforce(&h.graph, w.scaled())?;
    Ok(RainbowMatching::new(edges, value, w))
}

/// Frank's two-phase algorithm along a perfect elimination order.
fn mwis_peo(g: &PlainGraph, peo: &[usize], w: &[u64]) -> (u64, Vec<usize>) {
    let n = g.n();
    let mut pos = vec![0usize; n];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    let mut residual_weight = w.to_vec();
    let mut red = Vec::new();
    for &v in peo {
        let wv = residual_weight[v];
        if wv == 0 {
            continue;
        }
        red.push(v);
        for &u in g.neighbors(v) {
            if pos[u] > pos[v] {
                residual_weight[u] = residual_weight[u].saturating_sub(wv);
            }
        }
    }
    let mut taken = vec![false; n];
    let mut set = Vec::new();
    for &v in red.iter().rev() {
        if g.neighbors(v).iter().all(|&u| !taken[u]) {
            taken[v] = true;
            set.push(v);
        }
    }
    set.sort_unstable();
    (set.iter().map(|&v| w[v]).sum(), set)
}

/// Maximum-weight stable set of a chordal graph.
pub fn mwis_chordal(g: &PlainGraph, w: &[u64]) -> Result<(u64, Vec<usize>), RmError> {
    match is_chordal(g) {
        Chordality::Chordal { peo } => Ok(mwis_peo(g, &peo, w)),
        Chordality::Hole(HoleWitness(hole)) => Err(RmError::NotChordal(hole)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualSolver {
    Chordal,
    BruteForce,
    /// Chordal when the residual is chordal, else brute force.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub solver: ResidualSolver,
    pub prune: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { solver: ResidualSolver::Auto, prune: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BranchStats {
    /// Size of the assignment space, the product of `|C_i| + 1` over `F`.
    pub branches_explored: u64,
    pub rejected: u64,
    pub pruned: u64,
    pub solved: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RmSolution {
    pub matching: RainbowMatching,
    pub stats: BranchStats,
    pub solver: ResidualSolver,
}

/// Optimal rainbow matching given a deletion set `f`: branches over one
/// choice (or none) per deleted color and solves each compatible residual.
pub fn solve_rm_given_f(
    g: &EdgeColoredGraph,
    f: &ColorSet,
    w: &WeightVector,
    options: SolveOptions,
) -> Result<RmSolution, RmError> {
    check_weights(g, w)?;
    let k = g.color_count();
    if let Some(&c) = f.as_slice().iter().find(|&&c| c >= k) {
        return Err(RmError::ColorOutOfRange { color: c, k });
    }
    let h = build_conflict(g);
    let weights = w.scaled();
    let kept: Vec<usize> = h.vertices_where(|c| !f.contains(c));
    let residual = h.graph.induced(&kept);

    let (solver, peo) = match (options.solver, is_chordal(&residual)) {
        (ResidualSolver::Chordal | ResidualSolver::Auto, Chordality::Chordal { peo }) => {
            (ResidualSolver::Chordal, Some(peo.into_iter().map(|v| kept[v]).collect::<Vec<_>>()))
        }
        (ResidualSolver::Chordal, Chordality::Hole(hole)) => {
            return Err(RmError::NonChordalResidual(hole.0.iter().map(|&v| kept[v]).collect()));
        }
        _ if kept.len() <= BRUTE_FORCE_LIMIT => (ResidualSolver::BruteForce, None),
        _ => return Err(RmError::Unsolvable(kept.len())),
    };

    let classes: Vec<&[usize]> = f.as_slice().iter().map(|&c| g.class(c)).collect();
    let space = classes.iter().try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128 + 1));
    match space {
        Some(s) if s <= MAX_BRANCHES => {}
        Some(s) => return Err(RmError::TooManyBranches(s)),
        None => return Err(RmError::TooManyBranches(u128::MAX)),
    }

    let mut stats = BranchStats::default();
    let mut best: Option<(u64, Vec<usize>)> = None;
    // odometer digit i: 0 = ⊥, j > 0 = j-th edge of class i
    let mut digits = vec![0usize; classes.len()];
    let mut in_residual = vec![false; h.vertex_count()];
    loop {
        stats.branches_explored += 1;
        let chosen: Vec<usize> = digits
            .iter()
            .zip(&classes)
            .filter(|(&d, _)| d > 0)
            .map(|(&d, class)| class[d - 1])
            .collect();
        let conflicting = chosen
            .iter()
            .enumerate()
            .any(|(i, &a)| chosen[i + 1..].iter().any(|&b| h.graph.adjacent(a, b)));
        if conflicting {
            stats.rejected += 1;
        } else {
            let compatible: Vec<usize> = kept
                .iter()
                .copied()
                .filter(|&v| chosen.iter().all(|&c| !h.graph.adjacent(v, c)))
                .collect();
            let base: u64 = chosen.iter().map(|&e| weights[e]).sum();
            let bound = base + compatible.iter().map(|&v| weights[v]).sum::<u64>();
            if options.prune && best.as_ref().is_some_and(|(b, _)| bound <= *b) {
                stats.pruned += 1;
            } else {
                stats.solved += 1;
                let sub = h.graph.induced(&compatible);
                let sub_w: Vec<usize> = compatible.clone();
                let sub_weights: Vec<u64> = sub_w.iter().map(|&v| weights[v]).collect();
                let (value, set) = match &peo {
                    Some(order) => {
                        compatible.iter().for_each(|&v| in_residual[v] = true);
                        let mut local = vec![0usize; h.vertex_count()];
                        for (i, &v) in compatible.iter().enumerate() {
                            local[v] = i;
                        }
                        let sub_peo: Vec<usize> =
                            order.iter().filter(|&&v| in_residual[v]).map(|&v| local[v]).collect();
                        compatible.iter().for_each(|&v| in_residual[v] = false);
                        mwis_peo(&sub, &sub_peo, &sub_weights)
                    }
                    None => mwis_bruteforce(&sub, &sub_weights)?,
                };
                let total = base + value;
                if best.as_ref().is_none_or(|(b, _)| total > *b) {
                    let mut edges = chosen.clone();
                    edges.extend(set.iter().map(|&i| compatible[i]));
                    edges.sort_unstable();
                    best = Some((total, edges));
                }
            }
        }
        // advance the odometer, last class fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                let (value, edges) = best.expect("the empty assignment is never rejected");
                return Ok(RmSolution { matching: RainbowMatching::new(edges, value, w), stats, solver });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] <= classes[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{gen_bichromatic_cycle, gen_rainbow_cycle};

    #[test]
    fn brute_force_examples() {
        let c4 = gen_bichromatic_cycle(4).unwrap();
        assert_eq!(rm_bruteforce(&c4, &WeightVector::unit(4)).unwrap().scaled_value, 1);
        let c5 = gen_rainbow_cycle(5).unwrap();
        let m = rm_bruteforce(&c5, &WeightVector::unit(5)).unwrap();
        assert_eq!((m.scaled_value, m.edges.clone()), (2, vec![0, 2]));
        let single = EdgeColoredGraph::from_triples(2, &[(0, 1, 0)]).unwrap();
        assert_eq!(rm_bruteforce(&single, &WeightVector::unit(1)).unwrap().scaled_value, 1);
    }

    #[test]
    fn chordal_mwis_examples() {
        assert_eq!(mwis_chordal(&PlainGraph::path(3), &[1, 5, 1]).unwrap(), (5, vec![1]));
        assert_eq!(mwis_chordal(&PlainGraph::new(1), &[3]).unwrap(), (3, vec![0]));
        match mwis_chordal(&PlainGraph::cycle(4), &[1; 4]) {
            Err(RmError::NotChordal(h)) => assert_eq!(h.len(), 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn supplied_set_examples() {
        let c5 = gen_rainbow_cycle(5).unwrap();
        let unit = WeightVector::unit(5);
        let sol = solve_rm_given_f(&c5, &ColorSet::new(vec![0]), &unit, SolveOptions::default()).unwrap();
        assert_eq!(sol.matching.scaled_value, 2);
        assert_eq!(sol.stats.branches_explored, 2);
        assert_eq!(sol.solver, ResidualSolver::Chordal);
        let all = solve_rm_given_f(&c5, &ColorSet::all(5), &unit, SolveOptions::default()).unwrap();
        assert_eq!(all.matching.scaled_value, 2);
        assert_eq!(all.stats.branches_explored, 32);
        let c4 = gen_bichromatic_cycle(4).unwrap();
        let sol = solve_rm_given_f(&c4, &ColorSet::empty(), &WeightVector::unit(4), SolveOptions::default()).unwrap();
        assert_eq!(sol.matching.scaled_value, 1);
        let strict = SolveOptions { solver: ResidualSolver::Chordal, prune: true };
        assert!(matches!(
            solve_rm_given_f(&c5, &ColorSet::empty(), &unit, strict),
            Err(RmError::NonChordalResidual(_))
        ));
    }
}
