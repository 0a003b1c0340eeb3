//! Level-`t` Lasserre relaxation of `K_RM`, solved as a reduced SDP.
//!
//! For `t >= 1` every feasible `y` vanishes on sets of size at most `2t+1`
//! that are not stable in `H`, so the variables are the stable sets of size
//! `1..=2t+1`. Matrix rows that are identically zero or duplicate another
//! row are dropped before solving.

use std::collections::HashMap;

use serde::Serialize;

use super::krm::{lp_optimize, LpRelaxation, LpRow, RowKind};
use super::moment::{graded_lex_subsets, moment_matrix, psd_check, slack_moment_matrix, MomentVector, PsdCheckReport};
use super::sdp::{solve_sdp, SdpBlock, SdpFailure, SdpProblem, SdpSettings, SparseSym};
use super::LasserreError;
use crate::graph::{PlainGraph, WeightVector};

pub const MAX_LASSERRE_VARIABLES: usize = 12;
pub const MAX_LASSERRE_LEVEL: usize = 2;
pub const PSD_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LasserreSolution {
    pub level: usize,
    pub value: f64,
    #[serde(skip)]
    pub y: MomentVector,
    pub psd: Vec<PsdCheckReport>,
    pub iterations: usize,
}

impl LasserreSolution {
    pub fn psd_passed(&self) -> bool {
        self.psd.iter().all(|r| r.pass)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.psd.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

/// The graph on variables where `i ~ j` when some packing row contains both.
pub fn packing_graph(k: &LpRelaxation) -> PlainGraph {
    let mut g = PlainGraph::new(k.variables);
    for row in &k.rows {
        let s = row.packing_support();
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                if i != j && !g.adjacent(i, j) {
                    g.add_edge(i, j).expect("valid pair");
                }
            }
        }
    }
    g
}

fn stable_sets(g: &PlainGraph, max_size: usize) -> Vec<u64> {
    let masks = g.masks();
    let mut out = Vec::new();
    fn go(v: usize, n: usize, cur: u64, size: usize, max: usize, masks: &[u64], out: &mut Vec<u64>) {
        if v == n {
            out.push(cur);
            return;
        }
        go(v + 1, n, cur, size, max, masks, out);
        if size < max && masks[v] & cur == 0 {
            go(v + 1, n, cur | 1 << v, size + 1, max, masks, out);
        }
    }
    go(0, g.n(), 0, 0, max_size, &masks, &mut out);
    out.sort_by_key(|&m| (m.count_ones(), m.reverse_bits()));
    out
}

fn row_label(row: &LpRow) -> String {
    match row.kind {
        RowKind::Vertex(v) => format!("vertex:{v}"),
        RowKind::Color(c) => format!("color:{c}"),
        RowKind::Lower(e) => format!("lower:{e}"),
        RowKind::Upper(e) => format!("upper:{e}"),
    }
}

struct Assembler<'a> {
    var_of: &'a HashMap<u64, usize>,
    stable: &'a dyn Fn(u64) -> bool,
}

impl Assembler<'_> {
    /// Block with entries `Σ_(mask, coeff) coeff · y_{I∪J∪mask}` over `index`.
    fn block(&self, index: &[u64], combo: &[(u64, f64)]) -> SdpBlock {
        let mut constant: SparseSym = Vec::new();
        let mut terms: HashMap<usize, SparseSym> = HashMap::new();
        for a in 0..index.len() {
            for b in a..index.len() {
                let base = index[a] | index[b];
                for &(extra, coeff) in combo {
                    let s = base | extra;
                    if s == 0 {
                        constant.push((a, b, coeff));
                    } else if (self.stable)(s) {
                        terms.entry(self.var_of[&s]).or_default().push((a, b, coeff));
                    }
                }
            }
        }
        let mut terms: Vec<(usize, SparseSym)> = terms.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        SdpBlock { dim: index.len(), constant, terms }
    }
}

/// Optimizes `Σ w_e y_{e}` over level `t` of the hierarchy; level 0 is the LP.
pub fn lasserre_optimize(k: &LpRelaxation, t: usize, w: &WeightVector) -> Result<LasserreSolution, LasserreError> {
    let n = k.variables;
    if n > MAX_LASSERRE_VARIABLES {
        return Err(LasserreError::TooLarge { what: "Lasserre variables", found: n, limit: MAX_LASSERRE_VARIABLES });
    }
    if t > MAX_LASSERRE_LEVEL {
        return Err(LasserreError::TooLarge { what: "Lasserre level", found: t, limit: MAX_LASSERRE_LEVEL });
    }
    if w.len() != n {
        return Err(LasserreError::WeightLength { expected: n, found: w.len() });
    }
    let weights = w.as_f64();
    if t == 0 {
        let lp = lp_optimize(k, w)?;
        let mut values: HashMap<u64, f64> = HashMap::from([(0, 1.0)]);
        for (i, &v) in lp.point.iter().enumerate() {
            values.insert(1 << i, v);
        }
        let y = MomentVector::from_values(n, 0, values);
        return finish(k, 0, lp.value, y, 0);
    }

    let packing = packing_graph(k);
    let masks = packing.masks();
    let is_stable = |s: u64| members_iter(s).all(|v| masks[v] & s == 0);
    let vars: Vec<u64> = stable_sets(&packing, 2 * t + 1).into_iter().filter(|&s| s != 0).collect();
    let var_of: HashMap<u64, usize> = vars.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let asm = Assembler { var_of: &var_of, stable: &is_stable };
    let index_all: Vec<u64> = stable_sets(&packing, t);

    let mut blocks = vec![asm.block(&index_all, &[(0, 1.0)])];
    for row in &k.rows {
        let (index, combo): (Vec<u64>, Vec<(u64, f64)>) = match row.kind {
            RowKind::Vertex(_) | RowKind::Color(_) => {
                let support = row.coeffs.iter().fold(0u64, |m, &(i, _)| m | 1 << i);
                let index = index_all.iter().copied().filter(|&i| i & support == 0).collect();
                (index, row_combo(row))
            }
            RowKind::Lower(e) => {
                let bit = 1u64 << e;
                let index = index_all.iter().copied().filter(|&i| i & bit == 0 && is_stable(i | bit)).collect();
                (index, row_combo(row))
            }
            RowKind::Upper(e) => {
                let bit = 1u64 << e;
                let index = index_all.iter().copied().filter(|&i| i & bit == 0).collect();
                (index, row_combo(row))
            }
        };
        if !index.is_empty() {
            blocks.push(asm.block(&index, &combo));
        }
    }
    let objective: Vec<f64> = vars
        .iter()
        .map(|&s| if s.count_ones() == 1 { weights[s.trailing_zeros() as usize] } else { 0.0 })
        .collect();
    let problem = SdpProblem { objective, blocks };
    let sol = solve_sdp(&problem, SdpSettings::default()).map_err(|f| match f {
        SdpFailure::NotConverged { iterations, residuals } => LasserreError::NonConvergence { iterations, residuals },
        SdpFailure::Numerical { iterations, message } => {
            LasserreError::Numerical(format!("iteration {iterations}: {message}"))
        }
    })?;
    let mut values: HashMap<u64, f64> =
        graded_lex_subsets(n, MomentVector::max_size(t)).into_iter().map(|s| (s, 0.0)).collect();
    values.insert(0, 1.0);
    for (i, &s) in vars.iter().enumerate() {
        values.insert(s, sol.y[i]);
    }
    let y = MomentVector::from_values(n, t, values);
    finish(k, t, sol.value, y, sol.iterations)
}

fn members_iter(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask >> i & 1 == 1)
}

/// Coefficients of `Σ_i a_i y_{·∪{i}} − b y_{·}` as `(extra mask, coeff)`.
fn row_combo(row: &LpRow) -> Vec<(u64, f64)> {
    let mut combo: Vec<(u64, f64)> = row.coeffs.iter().map(|&(i, a)| (1u64 << i, a as f64)).collect();
    if row.rhs != 0 {
        combo.push((0, -(row.rhs as f64)));
    }
    combo
}

fn finish(k: &LpRelaxation, t: usize, value: f64, y: MomentVector, iterations: usize) -> Result<LasserreSolution, LasserreError> {
    let mut psd = vec![psd_check("moment", &moment_matrix(&y, t)?, PSD_TOLERANCE)];
    for row in &k.rows {
        psd.push(psd_check(row_label(row), &slack_moment_matrix(&y, row, t)?, PSD_TOLERANCE));
    }
    Ok(LasserreSolution { level: t, value, y, psd, iterations })
}
