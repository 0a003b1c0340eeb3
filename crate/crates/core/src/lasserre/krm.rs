//! The rainbow matching relaxation `K_RM` and its LP optimum.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::simplex::{solve, LinearProgram, LpOutcome, Scalar, Sense};
use super::LasserreError;
use crate::graph::{EdgeColoredGraph, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum RowKind {
    /// `Σ_{e∋v} x_e <= 1` for a vertex of `G`.
    Vertex(usize),
    /// `Σ_{e∈C_i} x_e <= 1`.
    Color(usize),
    /// `x_e >= 0`.
    Lower(usize),
    /// `x_e <= 1`.
    Upper(usize),
}

/// One row `Σ a_i x_i >= b` with sparse integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpRow {
    pub kind: RowKind,
    pub coeffs: Vec<(usize, i64)>,
    pub rhs: i64,
}

impl LpRow {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a as f64 * x[i]).sum::<f64>() - self.rhs as f64
    }

    /// Support of a packing row, empty for box rows.
    pub fn packing_support(&self) -> Vec<usize> {
        match self.kind {
            RowKind::Vertex(_) | RowKind::Color(_) => self.coeffs.iter().map(|&(i, _)| i).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpRelaxation {
    pub variables: usize,
    pub rows: Vec<LpRow>,
}

/// Vertex rows by vertex id (isolated vertices carry no row), color rows by
/// color id, then lower box rows and upper box rows by edge.
pub fn build_krm(g: &EdgeColoredGraph) -> LpRelaxation {
    let m = g.edge_count();
    let mut incident = vec![Vec::new(); g.vertex_count()];
    for (i, e) in g.edges().iter().enumerate() {
        incident[e.u].push(i);
        incident[e.v].push(i);
    }
    let mut rows = Vec::new();
    for (v, edges) in incident.iter().enumerate() {
        if !edges.is_empty() {
            rows.push(LpRow { kind: RowKind::Vertex(v), coeffs: edges.iter().map(|&e| (e, -1)).collect(), rhs: -1 });
        }
    }
    for c in 0..g.color_count() {
        rows.push(LpRow { kind: RowKind::Color(c), coeffs: g.class(c).iter().map(|&e| (e, -1)).collect(), rhs: -1 });
    }
    rows.extend((0..m).map(|e| LpRow { kind: RowKind::Lower(e), coeffs: vec![(e, 1)], rhs: 0 }));
    rows.extend((0..m).map(|e| LpRow { kind: RowKind::Upper(e), coeffs: vec![(e, -1)], rhs: -1 }));
    LpRelaxation { variables: m, rows }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<F> {
    pub value: F,
    pub point: Vec<F>,
}

fn optimize<F: Scalar>(k: &LpRelaxation, weights: Vec<F>) -> Result<LpSolution<F>, LasserreError> {
    let n = k.variables;
    let rows = k
        .rows
        .iter()
        .filter(|r| !matches!(r.kind, RowKind::Lower(_)))
        .map(|r| {
            let mut a = vec![F::zero(); n];
            for &(i, c) in &r.coeffs {
                a[i] = a[i].clone() + F::from_i64(c);
            }
            (a, Sense::Ge, F::from_i64(r.rhs))
        })
        .collect();
    match solve(&LinearProgram { objective: weights, rows }) {
        LpOutcome::Optimal { x, value } => Ok(LpSolution { value, point: x }),
        LpOutcome::Infeasible { .. } => Err(LasserreError::Lp("relaxation is infeasible".into())),
        LpOutcome::Unbounded => Err(LasserreError::Lp("relaxation is unbounded".into())),
    }
}

/// Largest LP handled.
pub const MAX_LP_VARIABLES: usize = 40;
/// Largest LP handled in exact arithmetic.
pub const MAX_EXACT_LP_VARIABLES: usize = 20;

fn check_lp(k: &LpRelaxation, w: &WeightVector, limit: usize) -> Result<(), LasserreError> {
    if k.variables > limit {
        return Err(LasserreError::TooLarge { what: "LP variables", found: k.variables, limit });
    }
    if w.len() != k.variables {
        return Err(LasserreError::WeightLength { expected: k.variables, found: w.len() });
    }
    Ok(())
}

pub fn lp_optimize(k: &LpRelaxation, w: &WeightVector) -> Result<LpSolution<f64>, LasserreError> {
    check_lp(k, w, MAX_LP_VARIABLES)?;
    optimize(k, w.as_f64())
}

pub fn lp_optimize_exact(k: &LpRelaxation, w: &WeightVector) -> Result<LpSolution<BigRational>, LasserreError> {
    check_lp(k, w, MAX_EXACT_LP_VARIABLES)?;
    let d = BigInt::from(w.denominator());
    let weights = w.scaled().iter().map(|&p| BigRational::new(BigInt::from(p), d.clone())).collect();
    optimize(k, weights)
}
