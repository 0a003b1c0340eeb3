//! Integrality gap measurement and the randomized checking suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::krm::{build_krm, lp_optimize};
use super::moment::{check_rank_closure, condition, condition_on_set};
use super::solve::lasserre_optimize;
use super::stab::{check_h_perfect, check_scaling_bound, gen_h_perfect};
use super::LasserreError;
use crate::conflict::{build_conflict, residual, ColorSet};
use crate::gadgets::gen_random;
use crate::graph::{ColoredEdge, EdgeColoredGraph, PlainGraph, WeightVector};
use crate::kappa::kappa_bruteforce;
use crate::recognition::{maximal_cliques, shortest_odd_hole, ClassOracle};
use crate::rm::{mwis_bruteforce, rm_bruteforce};

pub const GAP_TOLERANCE: f64 = 1e-4;
pub const EXACTNESS_TOLERANCE: f64 = 1e-4;

fn other<E: std::fmt::Display>(e: E) -> LasserreError {
    LasserreError::Precondition(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub deleted: Vec<usize>,
    pub level: usize,
    pub lasserre_value: f64,
    pub integer_optimum: f64,
    pub ratio: f64,
    /// `ℓ` from the shortest odd hole `2ℓ+1` of the residual.
    pub ell: Option<usize>,
    pub bound: f64,
    pub pass: bool,
}

/// `LAS_{k+1}` over the integer optimum for `k = |f|`, against `1 + 1/(2ℓ)`.
/// The residual `H − S(f)` must pass the desk-scale h-perfect check.
pub fn measure_gap(g: &EdgeColoredGraph, f: &ColorSet, w: &WeightVector) -> Result<GapReport, LasserreError> {
    let h = build_conflict(g);
    let r = residual(&h, f).graph;
    let check = check_h_perfect(&r, 8, 0)?;
    if !check.pass {
        return Err(LasserreError::Precondition(format!(
            "residual is not h-perfect ({} odd antiholes, violating weights {:?})",
            check.odd_antiholes, check.violation
        )));
    }
    let ell = shortest_odd_hole(&r).map_err(other)?.map(|len| (len - 1) / 2);
    let bound = ell.map_or(1.0, |l| 1.0 + 1.0 / (2 * l) as f64);
    let level = f.len() + 1;
    let las = lasserre_optimize(&build_krm(g), level, w)?;
    let opt = rm_bruteforce(g, w).map_err(other)?.value_f64();
    let ratio = if opt > 0.0 { las.value / opt } else { 1.0 };
    Ok(GapReport {
        deleted: f.as_slice().to_vec(),
        level,
        lasserre_value: las.value,
        integer_optimum: opt,
        ratio,
        ell,
        bound,
        pass: ratio <= bound + GAP_TOLERANCE,
    })
}

/// Rainbow `C5` on vertices `0..5` with colors `0..5`, plus one to three
/// edges of color 5 (chords or pendants) and maybe a pendant of color 6.
/// Deleting color 5 leaves a residual with `C5` as its shortest odd hole.
pub fn gen_gap_instance(seed: u64) -> (EdgeColoredGraph, ColorSet, WeightVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples: Vec<(usize, usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5, i)).collect();
    let mut n = 5;
    let mut candidates: Vec<(usize, usize)> = vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)];
    candidates.shuffle(&mut rng);
    for &(u, v) in candidates.iter().take(rng.gen_range(0..=1)) {
        triples.push((u, v, 5));
    }
    let pendants = if triples.len() == 5 { rng.gen_range(1..=2) } else { rng.gen_range(0..=2) };
    for _ in 0..pendants {
        triples.push((rng.gen_range(0..5), n, 5));
        n += 1;
    }
    let mut k = 6;
    if rng.gen_bool(0.5) {
        triples.push((rng.gen_range(0..5), n, 6));
        n += 1;
        k = 7;
    }
    let edges = triples.iter().map(|&(u, v, color)| ColoredEdge { u, v, color }).collect();
    let g = EdgeColoredGraph::new(n, k, edges).expect("valid construction");
    let w = WeightVector::from_integers((0..g.edge_count()).map(|_| rng.gen_range(1..=3)).collect());
    (g, ColorSet::new(vec![5]), w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    RankClosure,
    Scaling,
    Exactness,
    Gap,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::RankClosure => "rank-closure",
            Suite::Scaling => "scaling",
            Suite::Exactness => "exactness",
            Suite::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub checks: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        Self { suite, cases: 0, checks: 0, failures: Vec::new(), pass: true }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
            self.pass = false;
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport, LasserreError> {
    match suite {
        Suite::RankClosure => rank_closure_suite(12, seed),
        Suite::Scaling => scaling_suite(10, seed),
        Suite::Exactness => exactness_suite(20, seed),
        Suite::Gap => gap_suite(10, seed),
    }
}

/// Rank closure, clique closure, conditioning identity, monotonicity and
/// the integer/LP sandwich on random instances.
pub fn rank_closure_suite(instances: usize, seed: u64) -> Result<SuiteReport, LasserreError> {
    let mut report = SuiteReport::new(Suite::RankClosure);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..instances {
        let m = rng.gen_range(3..=7);
        let n = rng.gen_range(3..=6).max(4);
        let k = rng.gen_range(1..=m.min(5));
        let Ok(g) = gen_random(n, m.min(n * (n - 1) / 2), k.min(m), seed.wrapping_add(case as u64)) else {
            continue;
        };
        report.cases += 1;
        let m = g.edge_count();
        let k_rm = build_krm(&g);
        let w = WeightVector::from_integers((0..m).map(|_| rng.gen_range(1..=4)).collect());
        let h = build_conflict(&g).graph;
        let opt = rm_bruteforce(&g, &w).map_err(other)?.value_f64();
        let lp = lp_optimize(&k_rm, &w)?.value;
        let mut prev = lp;
        for t in 1..=2 {
            let sol = lasserre_optimize(&k_rm, t, &w)?;
            let id = format!("case {case} level {t}");
            report.check(sol.psd_passed(), || format!("{id}: PSD check failed ({})", sol.min_eigenvalue()));
            report.check(sol.value <= prev + 1e-5, || format!("{id}: value {} above previous level {prev}", sol.value));
            report.check(opt <= sol.value + 1e-5, || format!("{id}: value {} below integer optimum {opt}", sol.value));
            prev = sol.value;
            let y = &sol.y;
            if t == 1 {
                for q in maximal_cliques(&h) {
                    let r = check_rank_closure(y, &q, &h)?;
                    report.check(r.pass, || format!("{id}: clique {:?} mass {}", q, r.mass));
                }
            }
            for _ in 0..6 {
                let size = rng.gen_range(1..=m);
                let mut u: Vec<usize> = (0..m).collect();
                u.shuffle(&mut rng);
                u.truncate(size);
                u.sort_unstable();
                let sub = h.induced(&u);
                let (alpha, _) = mwis_bruteforce(&sub, &vec![1; u.len()]).map_err(other)?;
                if alpha as usize <= t {
                    let r = check_rank_closure(y, &u, &h)?;
                    report.check(r.pass, || format!("{id}: set {:?} mass {} alpha {}", u, r.mass, r.alpha));
                }
            }
            for i in 0..m {
                let c = condition(y, i)?;
                let err = c.reconstruction_error(y);
                report.check(err <= 1e-9, || format!("{id}: conditioning on {i} error {err}"));
            }
            if t == 2 {
                for class in g.classes().iter().filter(|c| c.len() <= 2) {
                    for (_, leaf) in condition_on_set(y, class)? {
                        let ok = class.iter().all(|&e| {
                            let v = leaf.singleton(e);
                            v.abs() < 1e-6 || (v - 1.0).abs() < 1e-6
                        });
                        report.check(ok, || format!("{id}: conditioning on class {class:?} left fractional values"));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Scaling bound on `C5`, `C7` and `random` generated h-perfect graphs.
pub fn scaling_suite(random: usize, seed: u64) -> Result<SuiteReport, LasserreError> {
    let mut report = SuiteReport::new(Suite::Scaling);
    let mut graphs = vec![PlainGraph::cycle(5), PlainGraph::cycle(7)];
    let mut s = seed;
    while graphs.len() < random + 2 {
        let g = gen_h_perfect(10, s)?;
        s = s.wrapping_add(1);
        graphs.push(g);
    }
    for (i, g) in graphs.iter().enumerate() {
        report.cases += 1;
        let r = check_scaling_bound(g, 6, seed.wrapping_add(i as u64))?;
        report.check(r.pass, || format!("graph {i} ({} vertices, λ = {}): {} failing points", r.vertices, r.lambda, r.failures.len()));
    }
    Ok(report)
}

/// `LAS_{k+1}` equals the integer optimum when a verified `F` with
/// `|F| = k <= 1` leaves a chordal residual.
pub fn exactness_suite(instances: usize, seed: u64) -> Result<SuiteReport, LasserreError> {
    let mut report = SuiteReport::new(Suite::Exactness);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = ClassOracle::chordal();
    let mut attempt = 0u64;
    let (mut with_deletion, mut without) = (0, 0);
    while with_deletion < instances && attempt < 50 * instances as u64 {
        attempt += 1;
        let n = rng.gen_range(4..=7);
        let m = rng.gen_range(4..=10).min(n * (n - 1) / 2);
        let k = rng.gen_range(2..=m.min(6));
        let Ok(g) = gen_random(n, m, k, seed.wrapping_add(attempt)) else { continue };
        let Ok(cert) = kappa_bruteforce(&g, &oracle, 1) else { continue };
        if cert.kappa == 1 {
            with_deletion += 1;
        } else if without < instances / 2 {
            without += 1;
        } else {
            continue;
        }
        report.cases += 1;
        let w = WeightVector::from_integers((0..g.edge_count()).map(|_| rng.gen_range(1..=3)).collect());
        let opt = rm_bruteforce(&g, &w).map_err(other)?.value_f64();
        let sol = lasserre_optimize(&build_krm(&g), cert.kappa + 1, &w)?;
        report.check((sol.value - opt).abs() <= EXACTNESS_TOLERANCE, || {
            format!("attempt {attempt}: F = {:?}, LAS_{} = {}, optimum {opt}", cert.colors, cert.kappa + 1, sol.value)
        });
    }
    report.check(with_deletion >= instances, || format!("only {with_deletion} instances with |F| = 1 found"));
    Ok(report)
}

/// Gap on constructed `k = 1`, `ℓ = 2` instances plus perfect residuals.
pub fn gap_suite(instances: usize, seed: u64) -> Result<SuiteReport, LasserreError> {
    let mut report = SuiteReport::new(Suite::Gap);
    for i in 0..instances {
        let (g, f, w) = gen_gap_instance(seed.wrapping_add(i as u64));
        report.cases += 1;
        let r = measure_gap(&g, &f, &w)?;
        report.check(r.pass && r.ell == Some(2), || format!("instance {i}: ratio {} bound {}", r.ratio, r.bound));
    }
    // a chordal instance with nothing deleted is exact at level 1
    let c4 = crate::gadgets::gen_bichromatic_cycle(4).map_err(other)?;
    let r = measure_gap(&c4, &ColorSet::empty(), &WeightVector::unit(4))?;
    report.cases += 1;
    report.check(r.pass && (r.ratio - 1.0).abs() <= GAP_TOLERANCE, || format!("bichromatic C4: ratio {}", r.ratio));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_on_constructed_instance() {
        let (g, f, w) = gen_gap_instance(1);
        let r = measure_gap(&g, &f, &w).unwrap();
        assert_eq!(r.ell, Some(2));
        assert!((r.bound - 1.25).abs() < 1e-12);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn small_suites_pass() {
        let r = rank_closure_suite(3, 5).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        let r = exactness_suite(3, 5).unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }
}
