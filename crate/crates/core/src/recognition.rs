//! Hereditary target classes and their witness-carrying membership tests.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::conflict::{BlockCutTree, ColorSet, ConflictGraph};
use crate::graph::PlainGraph;

/// Largest obstruction order accepted by finite-family oracles.
pub const MAX_OBSTRUCTION_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognitionError {
    #[error("obstruction family is empty")]
    EmptyFamily,
    #[error("obstruction of order {0} exceeds the limit of {MAX_OBSTRUCTION_ORDER}")]
    ObstructionTooLarge(usize),
    #[error("target class '{0}' is not clique-sum local")]
    NotCliqueSumLocal(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph with {0} vertices is too large for brute-force scanning")]
    TooLarge(usize),
}

/// An induced cycle of length at least 4, listed in cycle order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoleWitness(pub Vec<usize>);

impl HoleWitness {
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Re-checks that the witness is a chordless cycle of length >= 4 in `g`.
    pub fn verify(&self, g: &PlainGraph) -> bool {
        self.0.len() >= 4 && is_induced_cycle(g, &self.0)
    }
}

/// True when `cycle` (in order) is an induced cycle of `g` of length >= 3.
pub fn is_induced_cycle(g: &PlainGraph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    if k < 3 {
        return false;
    }
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k {
        return false;
    }
    (0..k).all(|i| {
        (i + 1..k).all(|j| {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            g.adjacent(cycle[i], cycle[j]) == consecutive
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Chordality {
    Chordal { peo: Vec<usize> },
    Hole(HoleWitness),
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal { .. })
    }
}

/// Maximum cardinality search; ties go to the smallest vertex id. Returns
/// the visiting order (its reverse is a PEO when the graph is chordal).
pub fn maximum_cardinality_search(g: &PlainGraph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    // bucket queue keyed by weight
    let mut buckets: Vec<Vec<usize>> = vec![(0..n).rev().collect()];
    let mut order = Vec::with_capacity(n);
    let mut top = 0usize;
    while order.len() < n {
        let v = loop {
            while buckets[top].is_empty() {
                top -= 1;
            }
            let v = buckets[top].pop().unwrap();
            if !numbered[v] && weight[v] == top {
                break v;
            }
        };
        numbered[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !numbered[w] {
                weight[w] += 1;
                let wt = weight[w];
                if buckets.len() <= wt {
                    buckets.resize(wt + 1, Vec::new());
                }
                // keep each bucket sorted descending so pop() yields the smallest id
                let b = &mut buckets[wt];
                let pos = b.partition_point(|&x| x > w);
                b.insert(pos, w);
                top = top.max(wt);
            }
        }
    }
    order
}

/// Checks that every vertex's later neighbors in `order` form a clique.
pub fn is_perfect_elimination_order(g: &PlainGraph, order: &[usize]) -> bool {
    peo_violation(g, order).is_none() && order.len() == g.n()
}

/// First `(v, a, b)` with `a`, `b` later neighbors of `v` that are not adjacent.
fn peo_violation(g: &PlainGraph, order: &[usize]) -> Option<(usize, usize, usize)> {
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in order {
        let later: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for (i, &a) in later.iter().enumerate() {
            if let Some(&b) = later[i + 1..].iter().find(|&&b| !g.adjacent(a, b)) {
                return Some((v, a, b));
            }
        }
    }
    None
}

/// Closes `v-a ... b-v` into a hole using a shortest `a`-`b` path that avoids
/// `v` and every other neighbor of `v`.
fn hole_through(g: &PlainGraph, v: usize, a: usize, b: usize) -> Option<HoleWitness> {
    let n = g.n();
    let mut blocked = vec![false; n];
    blocked[v] = true;
    for &w in g.neighbors(v) {
        blocked[w] = w != a && w != b;
    }
    let mut parent = vec![usize::MAX; n];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &y in g.neighbors(x) {
            if !blocked[y] && parent[y] == usize::MAX && !(x == a && y == b) {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    if parent[b] == usize::MAX {
        return None;
    }
    let mut cycle = vec![v];
    let mut path = vec![b];
    let mut x = b;
    while x != a {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    cycle.extend(path);
    Some(HoleWitness(cycle))
}

/// Some hole of `g`, or `None` if `g` is chordal. Exhaustive over centers.
pub fn find_hole(g: &PlainGraph) -> Option<HoleWitness> {
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if !g.adjacent(a, b) {
                    if let Some(h) = hole_through(g, v, a, b) {
                        return Some(h);
                    }
                }
            }
        }
    }
    None
}

/// Chordality with a verified PEO or an induced hole of length >= 4.
pub fn is_chordal(g: &PlainGraph) -> Chordality {
    let mut peo = maximum_cardinality_search(g);
    peo.reverse();
    match peo_violation(g, &peo) {
        None => Chordality::Chordal { peo },
        Some((v, a, b)) => {
            let hole = hole_through(g, v, a, b)
                .or_else(|| find_hole(g))
                .expect("a PEO violation after maximum cardinality search implies a hole");
            debug_assert!(hole.verify(g));
            Chordality::Hole(hole)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Bipartiteness {
    Bipartite { sides: Vec<u8> },
    /// A shortest odd cycle, which is necessarily induced.
    OddCycle(Vec<usize>),
}

impl Bipartiteness {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartiteness::Bipartite { .. })
    }
}

pub fn is_bipartite(g: &PlainGraph) -> Bipartiteness {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    let mut conflict = false;
    'outer: for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    conflict = true;
                    break 'outer;
                }
            }
        }
    }
    if !conflict {
        return Bipartiteness::Bipartite { sides: side };
    }
    Bipartiteness::OddCycle(shortest_odd_cycle(g).expect("non-bipartite graph has an odd cycle"))
}

fn shortest_odd_cycle(g: &PlainGraph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut found = None;
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if dist[w] == dist[v] && found.is_none() {
                    found = Some((v, w));
                }
            }
            if found.is_some() {
                break;
            }
        }
        if let Some((a, b)) = found {
            let len = 2 * dist[a] + 1;
            if best.as_ref().is_none_or(|x| len < x.0) {
                best = Some((len, a, b, parent));
            }
        }
    }
    let (_, a, b, parent) = best?;
    let climb = |mut x: usize| {
        let mut path = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            path.push(x);
        }
        path
    };
    let mut left = climb(a);
    let right = climb(b);
    left.reverse();
    // left: root..a, right: b..root; drop the repeated root.
    let root = left[0];
    left.extend(right.into_iter().take_while(|&x| x != root));
    Some(left)
}

fn degree_profile(g: &PlainGraph, vertices: &[usize]) -> Vec<usize> {
    let mut d: Vec<usize> = vertices
        .iter()
        .map(|&v| vertices.iter().filter(|&&w| g.adjacent(v, w)).count())
        .collect();
    d.sort_unstable();
    d
}

/// True when `g[vertices]` is isomorphic to `pattern`.
pub fn induced_isomorphic(g: &PlainGraph, vertices: &[usize], pattern: &PlainGraph) -> bool {
    let k = vertices.len();
    if k != pattern.n() {
        return false;
    }
    let pattern_degrees: Vec<usize> = (0..k).map(|v| pattern.degree(v)).collect();
    let mut sorted_pattern = pattern_degrees.clone();
    sorted_pattern.sort_unstable();
    if degree_profile(g, vertices) != sorted_pattern {
        return false;
    }
    let host_degrees: Vec<usize> = vertices
        .iter()
        .map(|&v| vertices.iter().filter(|&&w| g.adjacent(v, w)).count())
        .collect();
    let mut mapping = vec![usize::MAX; k];
    let mut used = vec![false; k];
    extend_mapping(g, vertices, pattern, &pattern_degrees, &host_degrees, &mut mapping, &mut used, 0)
}

#[allow(clippy::too_many_arguments)]
fn extend_mapping(
    g: &PlainGraph,
    vertices: &[usize],
    pattern: &PlainGraph,
    pattern_degrees: &[usize],
    host_degrees: &[usize],
    mapping: &mut [usize],
    used: &mut [bool],
    next: usize,
) -> bool {
    let k = vertices.len();
    if next == k {
        return true;
    }
    for slot in 0..k {
        if used[slot] || host_degrees[slot] != pattern_degrees[next] {
            continue;
        }
        let consistent = (0..next).all(|p| {
            pattern.adjacent(p, next) == g.adjacent(vertices[mapping[p]], vertices[slot])
        });
        if consistent {
            mapping[next] = slot;
            used[slot] = true;
            if extend_mapping(g, vertices, pattern, pattern_degrees, host_degrees, mapping, used, next + 1) {
                return true;
            }
            used[slot] = false;
        }
    }
    false
}

/// Calls `visit` on every `size`-subset of `0..n` in lexicographic order
/// until it returns `false`.
pub fn for_each_combination(n: usize, size: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - size {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if size == 0 || idx[i] == i + n - size {
            return;
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn family_sizes(family: &[PlainGraph]) -> Vec<usize> {
    let mut sizes: Vec<usize> = family.iter().map(PlainGraph::n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
}

fn check_family(family: &[PlainGraph]) -> Result<(), RecognitionError> {
    if family.is_empty() {
        return Err(RecognitionError::EmptyFamily);
    }
    if let Some(big) = family.iter().map(PlainGraph::n).find(|&n| n > MAX_OBSTRUCTION_ORDER) {
        return Err(RecognitionError::ObstructionTooLarge(big));
    }
    Ok(())
}

/// Membership in the class defined by forbidding `family` as induced
/// subgraphs. On failure the witness is the first offending vertex set in
/// (size, lexicographic) order.
pub fn finite_family_member(
    g: &PlainGraph,
    family: &[PlainGraph],
) -> Result<(bool, Option<Vec<usize>>), RecognitionError> {
    check_family(family)?;
    let mut witness = None;
    for size in family_sizes(family) {
        let members: Vec<&PlainGraph> = family.iter().filter(|f| f.n() == size).collect();
        for_each_combination(g.n(), size, |subset| {
            if members.iter().any(|f| induced_isomorphic(g, subset, f)) {
                witness = Some(subset.to_vec());
                false
            } else {
                true
            }
        });
        if witness.is_some() {
            return Ok((false, witness));
        }
    }
    Ok((true, None))
}

/// Every vertex set `U` with `g[U]` isomorphic to some family member.
pub fn induced_copies(g: &PlainGraph, family: &[PlainGraph]) -> Result<Vec<Vec<usize>>, RecognitionError> {
    check_family(family)?;
    let mut out = Vec::new();
    for size in family_sizes(family) {
        let members: Vec<&PlainGraph> = family.iter().filter(|f| f.n() == size).collect();
        for_each_combination(g.n(), size, |subset| {
            if members.iter().any(|f| induced_isomorphic(g, subset, f)) {
                out.push(subset.to_vec());
            }
            true
        });
    }
    Ok(out)
}

/// True if some clique of `g` is a cutset.
pub fn has_clique_cutset(g: &PlainGraph) -> bool {
    let n = g.n();
    assert!(n <= 20, "brute-force clique cutset search needs n <= 20");
    (1u32..(1 << n)).any(|mask| {
        let clique: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if clique.len() >= n || !g.is_clique(&clique) {
            return false;
        }
        let (rest, _) = g.without(&clique);
        !rest.is_connected()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    Chordal,
    Bipartite,
    Cluster,
    FiniteFamily,
}

impl TargetClass {
    pub fn name(self) -> &'static str {
        match self {
            TargetClass::Chordal => "chordal",
            TargetClass::Bipartite => "bipartite",
            TargetClass::Cluster => "cluster",
            TargetClass::FiniteFamily => "finite_family",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Obstruction vertices when `member` is false.
    pub witness: Option<Vec<usize>>,
}

/// A hereditary target class with a membership procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassOracle {
    class: TargetClass,
    family: Vec<PlainGraph>,
    clique_sum_local: bool,
}

impl ClassOracle {
    pub fn chordal() -> Self {
        Self { class: TargetClass::Chordal, family: Vec::new(), clique_sum_local: true }
    }

    pub fn bipartite() -> Self {
        Self { class: TargetClass::Bipartite, family: Vec::new(), clique_sum_local: true }
    }

    /// Disjoint unions of cliques: forbids an induced `P3`.
    pub fn cluster() -> Self {
        Self { class: TargetClass::Cluster, family: vec![PlainGraph::path(3)], clique_sum_local: false }
    }

    /// The class forbidding `family`; clique-sum locality holds when every
    /// obstruction is connected and has no clique cutset.
    pub fn finite_family(family: Vec<PlainGraph>) -> Result<Self, RecognitionError> {
        check_family(&family)?;
        let clique_sum_local = family.iter().all(|f| f.is_connected() && !has_clique_cutset(f));
        Ok(Self { class: TargetClass::FiniteFamily, family, clique_sum_local })
    }

    pub fn class(&self) -> TargetClass {
        self.class
    }

    pub fn family(&self) -> &[PlainGraph] {
        &self.family
    }

    pub fn is_clique_sum_local(&self) -> bool {
        self.clique_sum_local
    }

    /// `d_X`, the largest obstruction order, for finite families.
    pub fn obstruction_bound(&self) -> Option<usize> {
        match self.class {
            TargetClass::Cluster | TargetClass::FiniteFamily => self.family.iter().map(PlainGraph::n).max(),
            _ => None,
        }
    }

    pub fn membership(&self, g: &PlainGraph) -> Membership {
        match self.class {
            TargetClass::Chordal => match is_chordal(g) {
                Chordality::Chordal { .. } => Membership { member: true, witness: None },
                Chordality::Hole(h) => Membership { member: false, witness: Some(h.0) },
            },
            TargetClass::Bipartite => match is_bipartite(g) {
                Bipartiteness::Bipartite { .. } => Membership { member: true, witness: None },
                Bipartiteness::OddCycle(c) => Membership { member: false, witness: Some(c) },
            },
            TargetClass::Cluster | TargetClass::FiniteFamily => {
                let (member, witness) =
                    finite_family_member(g, &self.family).expect("family validated at construction");
                Membership { member, witness }
            }
        }
    }

    pub fn is_member(&self, g: &PlainGraph) -> bool {
        match self.class {
            TargetClass::Chordal => {
                let mut peo = maximum_cardinality_search(g);
                peo.reverse();
                peo_violation(g, &peo).is_none()
            }
            _ => self.membership(g).member,
        }
    }
}

/// Membership of `H − S(F)` decided block by block on the original blocks of `Γ`.
pub fn blockwise_member(
    h: &ConflictGraph,
    bct: &BlockCutTree,
    f: &ColorSet,
    oracle: &ClassOracle,
) -> Result<bool, RecognitionError> {
    if !oracle.is_clique_sum_local() {
        return Err(RecognitionError::NotCliqueSumLocal(oracle.class().name().into()));
    }
    Ok(bct.blocks.iter().all(|block| {
        let keep = h.vertices_where(|c| block.binary_search(&c).is_ok() && !f.contains(c));
        oracle.is_member(&h.graph.induced(&keep))
    }))
}

fn subset_is_cycle(g: &PlainGraph, vertices: &[usize]) -> Option<Vec<usize>> {
    let sub = g.induced(vertices);
    if (0..sub.n()).any(|v| sub.degree(v) != 2) || !sub.is_connected() {
        return None;
    }
    let mut order = vec![0usize];
    let mut prev = usize::MAX;
    let mut cur = 0usize;
    loop {
        let next = sub.neighbors(cur).iter().copied().find(|&w| w != prev).unwrap();
        if next == 0 {
            break;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    Some(order.into_iter().map(|i| vertices[i]).collect())
}

const SCAN_LIMIT: usize = 20;

/// All odd holes (induced odd cycles of length >= 5), by subset enumeration.
pub fn odd_holes(g: &PlainGraph) -> Result<Vec<Vec<usize>>, RecognitionError> {
    let n = g.n();
    if n > SCAN_LIMIT {
        return Err(RecognitionError::TooLarge(n));
    }
    let mut out = Vec::new();
    for size in (5..=n).step_by(2) {
        for_each_combination(n, size, |subset| {
            if let Some(cycle) = subset_is_cycle(g, subset) {
                out.push(cycle);
            }
            true
        });
    }
    Ok(out)
}

/// Odd antiholes of length >= 7 (length 5 antiholes are odd holes).
pub fn odd_antiholes(g: &PlainGraph) -> Result<Vec<Vec<usize>>, RecognitionError> {
    let n = g.n();
    if n > SCAN_LIMIT {
        return Err(RecognitionError::TooLarge(n));
    }
    let complement = g.complement();
    let mut out = Vec::new();
    for size in (7..=n).step_by(2) {
        for_each_combination(n, size, |subset| {
            if let Some(cycle) = subset_is_cycle(&complement, subset) {
                out.push(cycle);
            }
            true
        });
    }
    Ok(out)
}

/// Length of a shortest odd hole, if any.
pub fn shortest_odd_hole(g: &PlainGraph) -> Result<Option<usize>, RecognitionError> {
    Ok(odd_holes(g)?.iter().map(Vec::len).min())
}

/// Perfection by brute force: no odd hole and no odd antihole.
pub fn is_perfect_brute_force(g: &PlainGraph) -> Result<bool, RecognitionError> {
    Ok(odd_holes(g)?.is_empty() && odd_antiholes(g)?.is_empty())
}

/// Maximal cliques by Bron–Kerbosch with pivoting; each sorted, list sorted.
pub fn maximal_cliques(g: &PlainGraph) -> Vec<Vec<usize>> {
    fn expand(g: &PlainGraph, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| g.adjacent(u, v)).count())
            .unwrap();
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !g.adjacent(pivot, v)).collect();
        let mut p = p;
        let mut x = x;
        for v in candidates {
            r.push(v);
            let np = p.iter().copied().filter(|&w| g.adjacent(v, w)).collect();
            let nx = x.iter().copied().filter(|&w| g.adjacent(v, w)).collect();
            expand(g, r, np, nx, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    expand(g, &mut Vec::new(), (0..g.n()).collect(), Vec::new(), &mut out);
    out.sort();
    out
}

/// Parses an obstruction family: `p obs <count>`, then per obstruction a
/// `g <n> <m>` line followed by `m` lines `e <u> <v>`.
pub fn parse_obstructions(text: &str) -> Result<Vec<PlainGraph>, RecognitionError> {
    let mut count: Option<usize> = None;
    let mut family: Vec<PlainGraph> = Vec::new();
    let mut pending: Option<(PlainGraph, usize)> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |m: &str| RecognitionError::Parse { line, message: m.to_string() };
        let toks: Vec<&str> = t.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("expected integer, got '{s}'")));
        match toks[0] {
            "p" if toks.len() == 3 && toks[1] == "obs" && count.is_none() => count = Some(num(toks[2])?),
            "g" if toks.len() == 3 && count.is_some() => {
                if let Some((_, left)) = &pending {
                    if *left > 0 {
                        return Err(err("previous obstruction has missing edges"));
                    }
                }
                if let Some((g, _)) = pending.take() {
                    family.push(g);
                }
                let n = num(toks[1])?;
                if n > MAX_OBSTRUCTION_ORDER {
                    return Err(RecognitionError::ObstructionTooLarge(n));
                }
                pending = Some((PlainGraph::new(n), num(toks[2])?));
            }
            "e" if toks.len() == 3 => {
                let Some((g, left)) = pending.as_mut() else {
                    return Err(err("edge line outside an obstruction"));
                };
                if *left == 0 {
                    return Err(err("too many edges for obstruction"));
                }
                g.add_edge(num(toks[1])?, num(toks[2])?).map_err(|e| err(&e.to_string()))?;
                *left -= 1;
            }
            _ => return Err(err("expected 'p obs <count>', 'g <n> <m>' or 'e <u> <v>'")),
        }
    }
    let err = |m: &str| RecognitionError::Parse { line: last_line, message: m.to_string() };
    if let Some((g, left)) = pending.take() {
        if left > 0 {
            return Err(err("last obstruction has missing edges"));
        }
        family.push(g);
    }
    let Some(expected) = count else { return Err(err("missing 'p obs' header")) };
    if family.len() != expected {
        return Err(err(&format!("expected {expected} obstructions, found {}", family.len())));
    }
    check_family(&family)?;
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_peo_check(g: &PlainGraph, peo: &[usize]) -> bool {
        peo.iter().enumerate().all(|(i, &v)| {
            let later: Vec<usize> = peo[i + 1..].iter().copied().filter(|&w| g.adjacent(v, w)).collect();
            g.is_clique(&later)
        })
    }

    #[test]
    fn chordal_examples() {
        let k4 = PlainGraph::complete(4);
        match is_chordal(&k4) {
            Chordality::Chordal { peo } => assert!(naive_peo_check(&k4, &peo)),
            _ => panic!("K4 is chordal"),
        }
        for n in [4, 5, 7] {
            let c = PlainGraph::cycle(n);
            match is_chordal(&c) {
                Chordality::Hole(h) => {
                    assert_eq!(h.len(), n);
                    assert!(h.verify(&c));
                }
                _ => panic!("C{n} is not chordal"),
            }
        }
    }

    #[test]
    fn hole_inside_larger_graph() {
        // C4 0-1-2-3 with a pendant triangle at 0 and a chord-free tail.
        let g = PlainGraph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (0, 5), (5, 6)])
            .unwrap();
        match is_chordal(&g) {
            Chordality::Hole(h) => assert!(h.verify(&g) && h.len() == 4),
            _ => panic!("graph contains C4"),
        }
    }

    #[test]
    fn bipartite_examples() {
        assert!(is_bipartite(&PlainGraph::cycle(4)).is_bipartite());
        for (g, len) in [(PlainGraph::cycle(5), 5), (PlainGraph::complete(3), 3)] {
            match is_bipartite(&g) {
                Bipartiteness::OddCycle(c) => {
                    assert_eq!(c.len(), len);
                    assert!(is_induced_cycle(&g, &c));
                }
                _ => panic!("odd cycle expected"),
            }
        }
    }

    #[test]
    fn finite_family_examples() {
        let p3 = vec![PlainGraph::path(3)];
        assert_eq!(finite_family_member(&PlainGraph::complete(3), &p3).unwrap(), (true, None));
        assert_eq!(finite_family_member(&PlainGraph::path(3), &p3).unwrap(), (false, Some(vec![0, 1, 2])));
        let holes = vec![PlainGraph::cycle(4), PlainGraph::cycle(5)];
        assert_eq!(
            finite_family_member(&PlainGraph::cycle(5), &holes).unwrap(),
            (false, Some(vec![0, 1, 2, 3, 4]))
        );
        assert_eq!(finite_family_member(&PlainGraph::cycle(5), &[]), Err(RecognitionError::EmptyFamily));
        assert_eq!(
            finite_family_member(&PlainGraph::cycle(5), &[PlainGraph::cycle(9)]),
            Err(RecognitionError::ObstructionTooLarge(9))
        );
    }

    #[test]
    fn clique_sum_locality_flags() {
        assert!(ClassOracle::chordal().is_clique_sum_local());
        assert!(ClassOracle::bipartite().is_clique_sum_local());
        assert!(!ClassOracle::cluster().is_clique_sum_local());
        let holes = ClassOracle::finite_family(vec![PlainGraph::cycle(4), PlainGraph::cycle(5)]).unwrap();
        assert!(holes.is_clique_sum_local());
        let paw = PlainGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert!(!ClassOracle::finite_family(vec![paw]).unwrap().is_clique_sum_local());
        let split = vec![PlainGraph::cycle(4), PlainGraph::cycle(5), PlainGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()];
        assert!(!ClassOracle::finite_family(split).unwrap().is_clique_sum_local());
    }

    #[test]
    fn odd_hole_scan() {
        assert_eq!(odd_holes(&PlainGraph::cycle(7)).unwrap().len(), 1);
        assert!(odd_holes(&PlainGraph::cycle(6)).unwrap().is_empty());
        assert_eq!(shortest_odd_hole(&PlainGraph::cycle(5)).unwrap(), Some(5));
        let anti7 = PlainGraph::cycle(7).complement();
        assert_eq!(odd_antiholes(&anti7).unwrap().len(), 1);
        assert!(is_perfect_brute_force(&PlainGraph::cycle(6)).unwrap());
        assert!(!is_perfect_brute_force(&anti7).unwrap());
    }

    #[test]
    fn maximal_cliques_of_small_graphs() {
        assert_eq!(maximal_cliques(&PlainGraph::cycle(4)), vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);
        assert_eq!(maximal_cliques(&PlainGraph::complete(3)), vec![vec![0, 1, 2]]);
        assert_eq!(maximal_cliques(&PlainGraph::new(2)), vec![vec![0], vec![1]]);
    }

    #[test]
    fn obstruction_file_round() {
        let text = "# holes\np obs 2\ng 4 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\ng 3 2\ne 0 1\ne 1 2\n";
        let fam = parse_obstructions(text).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[0], PlainGraph::cycle(4));
        assert!(parse_obstructions("p obs 1\ng 3 2\ne 0 1\n").is_err());
        assert!(parse_obstructions("p obs 1\ng 9 0\n").is_err());
        assert!(parse_obstructions("p obs 0\n").is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        for_each_combination(3, 0, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }
}
