//! Stable set polytope membership, desk-scale h-perfection, and the
//! `2ℓ/(2ℓ+1)` scaling of the clique relaxation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::simplex::{solve, LinearProgram, LpOutcome, Sense};
use super::LasserreError;
use crate::graph::PlainGraph;
use crate::recognition::{maximal_cliques, odd_antiholes, odd_holes};
use crate::rm::mwis_bruteforce;

pub const MAX_STAB_VERTICES: usize = 18;
/// Largest graph for which the h-perfect check enumerates all 0/1 weights.
pub const MAX_HPERFECT_VERTICES: usize = 12;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// All stable sets as sorted vertex lists, the empty set first.
pub fn stable_sets(g: &PlainGraph) -> Vec<Vec<usize>> {
    let masks = g.masks();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(v: usize, n: usize, taken: u64, cur: &mut Vec<usize>, masks: &[u64], out: &mut Vec<Vec<usize>>) {
        if v == n {
            out.push(cur.clone());
            return;
        }
        go(v + 1, n, taken, cur, masks, out);
        if masks[v] & taken == 0 {
            cur.push(v);
            go(v + 1, n, taken | 1 << v, cur, masks, out);
            cur.pop();
        }
    }
    go(0, g.n(), 0, &mut cur, &masks, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum StabMembership {
    /// `x = Σ λ_S χ_S` with `λ >= 0`, `Σ λ_S = 1`.
    Member { combination: Vec<(Vec<usize>, BigRational)> },
    /// `a·χ_S <= β` for every stable `S` while `a·x > β`.
    Separated { a: Vec<BigRational>, beta: BigRational },
}

impl StabMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, StabMembership::Member { .. })
    }

    /// Rechecks the certificate exactly against `g` and `x`.
    pub fn verify(&self, g: &PlainGraph, x: &[BigRational]) -> bool {
        match self {
            StabMembership::Member { combination } => {
                let mut sum = vec![BigRational::zero(); g.n()];
                let mut total = BigRational::zero();
                for (s, l) in combination {
                    if l.is_negative() || !g.is_stable(s) {
                        return false;
                    }
                    total += l;
                    for &v in s {
                        sum[v] += l;
                    }
                }
                total.is_one() && sum.as_slice() == x
            }
            StabMembership::Separated { a, beta } => {
                let ax: BigRational = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
                ax > *beta
                    && stable_sets(g).iter().all(|s| s.iter().map(|&v| a[v].clone()).sum::<BigRational>() <= *beta)
            }
        }
    }
}

/// Decides `x ∈ STAB(g)` exactly with a phase-one LP over stable sets.
pub fn stab_membership(g: &PlainGraph, x: &[BigRational]) -> Result<StabMembership, LasserreError> {
    let n = g.n();
    if n > MAX_STAB_VERTICES {
        return Err(LasserreError::TooLarge { what: "STAB vertices", found: n, limit: MAX_STAB_VERTICES });
    }
    if x.len() != n {
        return Err(LasserreError::WeightLength { expected: n, found: x.len() });
    }
    let sets = stable_sets(g);
    let mut rows: Vec<(Vec<BigRational>, Sense, BigRational)> = Vec::with_capacity(n + 1);
    rows.push((vec![BigRational::one(); sets.len()], Sense::Eq, BigRational::one()));
    for (v, xv) in x.iter().enumerate() {
        let a = sets.iter().map(|s| if s.contains(&v) { BigRational::one() } else { BigRational::zero() }).collect();
        rows.push((a, Sense::Eq, xv.clone()));
    }
    let lp = LinearProgram { objective: vec![BigRational::zero(); sets.len()], rows };
    let cert = match solve(&lp) {
        LpOutcome::Optimal { x: lambda, .. } => StabMembership::Member {
            combination: sets.into_iter().zip(lambda).filter(|(_, l)| !l.is_zero()).collect(),
        },
        LpOutcome::Infeasible { farkas } => {
            StabMembership::Separated { a: farkas[1..].to_vec(), beta: -farkas[0].clone() }
        }
        LpOutcome::Unbounded => return Err(LasserreError::Lp("feasibility LP reported unbounded".into())),
    };
    if !cert.verify(g, x) {
        return Err(LasserreError::Numerical("STAB certificate failed exact verification".into()));
    }
    Ok(cert)
}

/// `max w·x` over `x >= 0`, `x(Q) <= 1` for maximal cliques and
/// `x(C) <= (|C|-1)/2` for odd holes.
fn clique_hole_lp(cliques: &[Vec<usize>], holes: &[Vec<usize>], w: &[i64]) -> f64 {
    let n = w.len();
    let mut rows = Vec::new();
    for (set, rhs) in cliques.iter().map(|c| (c, 1)).chain(holes.iter().map(|h| (h, (h.len() - 1) / 2))) {
        let mut a = vec![0.0; n];
        for &v in set {
            a[v] = 1.0;
        }
        rows.push((a, Sense::Le, rhs as f64));
    }
    let objective = w.iter().map(|&c| c as f64).collect();
    match solve(&LinearProgram { objective, rows }) {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("bounded feasible LP: {other:?}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPerfectReport {
    pub odd_holes: usize,
    pub odd_antiholes: usize,
    pub weights_checked: usize,
    /// First weight vector where the LP exceeds the stability number.
    pub violation: Option<Vec<i64>>,
    pub pass: bool,
}

/// No odd antihole, and the clique plus odd-hole LP equals `α_w` for every
/// 0/1 weight and `random_weights` random weights in `1..=5`.
pub fn check_h_perfect(g: &PlainGraph, random_weights: usize, seed: u64) -> Result<HPerfectReport, LasserreError> {
    let n = g.n();
    if n > MAX_HPERFECT_VERTICES {
        return Err(LasserreError::TooLarge { what: "h-perfect check vertices", found: n, limit: MAX_HPERFECT_VERTICES });
    }
    let map = |e: crate::recognition::RecognitionError| LasserreError::Precondition(e.to_string());
    let holes = odd_holes(g).map_err(map)?;
    let antiholes = odd_antiholes(g).map_err(map)?;
    let mut report = HPerfectReport {
        odd_holes: holes.len(),
        odd_antiholes: antiholes.len(),
        weights_checked: 0,
        violation: None,
        pass: antiholes.is_empty(),
    };
    if !report.pass {
        return Ok(report);
    }
    let cliques = maximal_cliques(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let binary = (0..1u64 << n).map(|m| (0..n).map(|v| (m >> v & 1) as i64).collect::<Vec<_>>());
    let random: Vec<Vec<i64>> = (0..random_weights).map(|_| (0..n).map(|_| rng.gen_range(1..=5)).collect()).collect();
    for w in binary.chain(random) {
        report.weights_checked += 1;
        let lp = clique_hole_lp(&cliques, &holes, &w);
        let wu: Vec<u64> = w.iter().map(|&c| c as u64).collect();
        let (alpha, _) = mwis_bruteforce(g, &wu).map_err(|e| LasserreError::Numerical(e.to_string()))?;
        if (lp - alpha as f64).abs() > 1e-7 {
            report.violation = Some(w);
            report.pass = false;
            break;
        }
    }
    Ok(report)
}

/// Random clique-sums of odd cycles and small cliques, kept only when the
/// desk-scale h-perfect check passes. At most `max_n` vertices.
pub fn gen_h_perfect(max_n: usize, seed: u64) -> Result<PlainGraph, LasserreError> {
    let max_n = max_n.clamp(3, MAX_HPERFECT_VERTICES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut n = 0;
        let mut first = true;
        loop {
            let piece = match rng.gen_range(0..3) {
                0 => Piece::Cycle(5),
                1 => Piece::Cycle(if rng.gen_bool(0.5) { 5 } else { 7 }),
                _ => Piece::Clique(rng.gen_range(2..=4)),
            };
            let size = piece.size();
            let glue = if first { 0 } else { rng.gen_range(1..=2usize) };
            if n + size - glue > max_n {
                break;
            }
            // glue onto an existing vertex or edge
            let anchor: Vec<usize> = if glue == 0 {
                Vec::new()
            } else if glue == 1 || edges.is_empty() {
                vec![rng.gen_range(0..n)]
            } else {
                let (a, b) = edges[rng.gen_range(0..edges.len())];
                vec![a, b]
            };
            let mut ids: Vec<usize> = anchor.clone();
            while ids.len() < size {
                ids.push(n);
                n += 1;
            }
            for (a, b) in piece.edges() {
                let (u, v) = (ids[a].min(ids[b]), ids[a].max(ids[b]));
                if !edges.contains(&(u, v)) {
                    edges.push((u, v));
                }
            }
            first = false;
        }
        if n < 3 {
            continue;
        }
        let g = PlainGraph::from_edges(n, &edges).map_err(|e| LasserreError::Precondition(e.to_string()))?;
        if check_h_perfect(&g, 4, seed)?.pass {
            return Ok(g);
        }
    }
    Err(LasserreError::Precondition("no h-perfect graph found".into()))
}

enum Piece {
    Cycle(usize),
    Clique(usize),
}

impl Piece {
    fn size(&self) -> usize {
        match *self {
            Piece::Cycle(k) | Piece::Clique(k) => k,
        }
    }

    /// Edges with vertex 0 and 1 adjacent, so an edge anchor glues a clique.
    fn edges(&self) -> Vec<(usize, usize)> {
        match *self {
            Piece::Cycle(k) => (0..k).map(|i| (i, (i + 1) % k)).collect(),
            Piece::Clique(k) => (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub vertices: usize,
    pub perfect: bool,
    pub shortest_odd_hole: Option<usize>,
    /// `2ℓ/(2ℓ+1)` as `"p/q"`, or `"1"` for perfect graphs.
    pub lambda: String,
    pub points_checked: usize,
    pub failures: Vec<Vec<String>>,
    pub pass: bool,
}

/// Checks `λ·x ∈ STAB(g)` for LP vertices of the clique relaxation `P(g)`,
/// random rational points of `P(g)`, and half-vectors on odd holes.
pub fn check_scaling_bound(g: &PlainGraph, samples: usize, seed: u64) -> Result<ScalingReport, LasserreError> {
    let n = g.n();
    let map = |e: crate::recognition::RecognitionError| LasserreError::Precondition(e.to_string());
    let holes = odd_holes(g).map_err(map)?;
    let shortest = holes.iter().map(Vec::len).min();
    let lambda = match shortest {
        Some(len) => q(len as i64 - 1, len as i64),
        None => BigRational::one(),
    };
    let cliques = maximal_cliques(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<BigRational>> = Vec::new();
    for _ in 0..samples {
        // vertex of P(g) maximizing a random objective
        let objective: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(1..=9), 1)).collect();
        let rows = cliques
            .iter()
            .map(|c| {
                let a = (0..n).map(|v| if c.contains(&v) { BigRational::one() } else { BigRational::zero() }).collect();
                (a, Sense::Le, BigRational::one())
            })
            .collect();
        if let LpOutcome::Optimal { x, .. } = solve(&LinearProgram { objective, rows }) {
            points.push(x);
        }
        // random point pushed into P(g)
        let d = rng.gen_range(2..=12);
        let mut x: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(0..=d), d)).collect();
        let worst = cliques
            .iter()
            .map(|c| c.iter().map(|&v| x[v].clone()).sum::<BigRational>())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        if worst > BigRational::one() {
            x.iter_mut().for_each(|v| *v = &*v / &worst);
        }
        points.push(x);
    }
    for hole in &holes {
        let mut x = vec![BigRational::zero(); n];
        hole.iter().for_each(|&v| x[v] = q(1, 2));
        points.push(x);
    }
    let mut failures = Vec::new();
    for x in &points {
        let scaled: Vec<BigRational> = x.iter().map(|v| v * &lambda).collect();
        if !stab_membership(g, &scaled)?.is_member() {
            failures.push(x.iter().map(|v| v.to_string()).collect());
        }
    }
    Ok(ScalingReport {
        vertices: n,
        perfect: shortest.is_none(),
        shortest_odd_hole: shortest,
        lambda: lambda.to_string(),
        points_checked: points.len(),
        pass: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_is_member() {
        let g = PlainGraph::cycle(5);
        let x = vec![q(1, 1), q(0, 1), q(1, 1), q(0, 1), q(0, 1)];
        let StabMembership::Member { combination } = stab_membership(&g, &x).unwrap() else { panic!() };
        assert_eq!(combination, vec![(vec![0, 2], q(1, 1))]);
    }

    #[test]
    fn half_vector_on_c5_is_separated() {
        let g = PlainGraph::cycle(5);
        let x = vec![q(1, 2); 5];
        let cert = stab_membership(&g, &x).unwrap();
        assert!(!cert.is_member());
        assert!(cert.verify(&g, &x));
        assert!(stab_membership(&g, &vec![q(2, 5); 5]).unwrap().is_member());
    }

    #[test]
    fn h_perfect_desk_check() {
        assert!(check_h_perfect(&PlainGraph::cycle(5), 5, 1).unwrap().pass);
        assert!(check_h_perfect(&PlainGraph::complete(4), 5, 1).unwrap().pass);
        // the antihole of C7 is not h-perfect
        let r = check_h_perfect(&PlainGraph::cycle(7).complement(), 0, 1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.odd_antiholes, 1);
        let g = gen_h_perfect(10, 3).unwrap();
        assert!(g.n() <= 10);
    }

    #[test]
    fn scaling_on_cycles() {
        let r = check_scaling_bound(&PlainGraph::cycle(5), 4, 7).unwrap();
        assert_eq!(r.lambda, "4/5");
        assert!(r.pass, "{r:?}");
        let r = check_scaling_bound(&PlainGraph::cycle(7), 4, 7).unwrap();
        assert_eq!(r.lambda, "6/7");
        assert!(r.pass, "{r:?}");
        let r = check_scaling_bound(&PlainGraph::path(4), 2, 7).unwrap();
        assert!(r.perfect && r.pass);
        assert_eq!(r.lambda, "1");
    }
}
