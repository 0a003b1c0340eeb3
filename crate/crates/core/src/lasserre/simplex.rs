//! Dense two-phase simplex with Bland's rule over `f64` or exact rationals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Ordered field used by the simplex; `f64` compares with a tolerance.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_zero_ish(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }
    fn less_than(&self, other: &Self) -> bool {
        (other.clone() - self.clone()).is_positive()
    }
}

const F64_EPS: f64 = 1e-10;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_positive(&self) -> bool {
        *self > F64_EPS
    }
    fn is_negative(&self) -> bool {
        *self < -F64_EPS
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `maximize c·x` subject to `rows` and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<F> {
    pub objective: Vec<F>,
    pub rows: Vec<(Vec<F>, Sense, F)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<F> {
    Optimal { x: Vec<F>, value: F },
    /// `π` with `π·A_j <= 0` for every column, `π·b > 0`, and sign
    /// compatible with the inequality rows (`π_i <= 0` on `<=` rows,
    /// `π_i >= 0` on `>=` rows).
    Infeasible { farkas: Vec<F> },
    Unbounded,
}

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    rhs: Vec<F>,
    basis: Vec<usize>,
    columns: usize,
}

impl<F: Scalar> Tableau<F> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero_ish() {
                self.rows[i][c] = F::zero();
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero_ish() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
            self.rows[i][c] = F::zero();
            self.rhs[i] = self.rhs[i].clone() - factor * pivot_rhs.clone();
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[F]) -> Vec<F> {
        (0..self.columns)
            .map(|j| {
                self.basis.iter().enumerate().fold(cost[j].clone(), |acc, (i, &b)| {
                    let a = &self.rows[i][j];
                    if a.is_zero_ish() || cost[b].is_zero_ish() {
                        acc
                    } else {
                        acc - cost[b].clone() * a.clone()
                    }
                })
            })
            .collect()
    }

    /// Maximizes `cost` over the current basis; `allowed` masks entering columns.
    fn optimize(&mut self, cost: &[F], allowed: &[bool]) -> Result<Vec<F>, ()> {
        loop {
            let rc = self.reduced_costs(cost);
            let Some(enter) = (0..self.columns).find(|&j| allowed[j] && rc[j].is_positive()) else {
                return Ok(rc);
            };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio.less_than(lr) || (!lr.less_than(&ratio) && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(()),
            }
        }
    }
}

pub fn solve<F: Scalar>(lp: &LinearProgram<F>) -> LpOutcome<F> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    let mut flipped = vec![false; m];
    let mut senses = Vec::with_capacity(m);
    let mut dense: Vec<Vec<F>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (a, sense, b)) in lp.rows.iter().enumerate() {
        assert_eq!(a.len(), n, "row {i} has wrong length");
        if b.is_negative() {
            flipped[i] = true;
            dense.push(a.iter().map(|v| -v.clone()).collect());
            rhs.push(-b.clone());
            senses.push(match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            });
        } else {
            dense.push(a.clone());
            rhs.push(b.clone());
            senses.push(*sense);
        }
    }
    // columns: structural, one slack/surplus per inequality, one artificial per >=/= row
    let mut slack_col = vec![None; m];
    let mut art_col = vec![None; m];
    let mut next = n;
    for i in 0..m {
        if senses[i] != Sense::Eq {
            slack_col[i] = Some(next);
            next += 1;
        }
    }
    for i in 0..m {
        if senses[i] != Sense::Le {
            art_col[i] = Some(next);
            next += 1;
        }
    }
    let columns = next;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = dense[i].clone();
        row.resize(columns, F::zero());
        if let Some(s) = slack_col[i] {
            row[s] = if senses[i] == Sense::Le { F::one() } else { -F::one() };
        }
        if let Some(a) = art_col[i] {
            row[a] = F::one();
            basis.push(a);
        } else {
            basis.push(slack_col[i].unwrap());
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, rhs, basis, columns };
    let is_art: Vec<bool> = {
        let mut v = vec![false; columns];
        art_col.iter().flatten().for_each(|&a| v[a] = true);
        v
    };

    if is_art.iter().any(|&a| a) {
        let cost: Vec<F> = (0..columns).map(|j| if is_art[j] { -F::one() } else { F::zero() }).collect();
        let all = vec![true; columns];
        let rc = tab.optimize(&cost, &all).expect("phase one is bounded");
        let value = tab
            .basis
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (i, &b)| acc + cost[b].clone() * tab.rhs[i].clone());
        if value.is_negative() {
            // duals u_i from the column that started as e_i
            let farkas = (0..m)
                .map(|i| {
                    let pi = match (art_col[i], slack_col[i]) {
                        (Some(a), _) => F::one() + rc[a].clone(),
                        (None, Some(s)) => rc[s].clone(),
                        (None, None) => unreachable!(),
                    };
                    if flipped[i] {
                        -pi
                    } else {
                        pi
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if is_art[tab.basis[r]] {
                if let Some(c) = (0..columns).find(|&c| !is_art[c] && !tab.rows[r][c].is_zero_ish()) {
                    tab.pivot(r, c);
                }
            }
        }
    }
    let mut cost = vec![F::zero(); columns];
    cost[..n].clone_from_slice(&lp.objective);
    let allowed: Vec<bool> = is_art.iter().map(|&a| !a).collect();
    if tab.optimize(&cost, &allowed).is_err() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![F::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[i].clone();
        }
    }
    let value = x.iter().zip(&lp.objective).fold(F::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn small_max_problem() {
        // max x + y, x + 2y <= 4, 3x + y <= 6
        let lp = LinearProgram {
            objective: vec![1.0, 1.0],
            rows: vec![(vec![1.0, 2.0], Sense::Le, 4.0), (vec![3.0, 1.0], Sense::Le, 6.0)],
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, x } => {
                assert!((value - 2.8).abs() < 1e-9);
                assert!((x[0] - 1.6).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_equalities_and_ge() {
        // max -x - y, x + y = 1, x >= 1/3
        let lp = LinearProgram {
            objective: vec![q(-1, 1), q(-2, 1)],
            rows: vec![
                (vec![q(1, 1), q(1, 1)], Sense::Eq, q(1, 1)),
                (vec![q(1, 1), q(0, 1)], Sense::Ge, q(1, 3)),
            ],
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, q(-1, 1));
                assert_eq!(x, vec![q(1, 1), q(0, 1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_certificate() {
        // x + y = 1, x + y = 2
        let a = vec![q(1, 1), q(1, 1)];
        let lp = LinearProgram {
            objective: vec![q(0, 1), q(0, 1)],
            rows: vec![(a.clone(), Sense::Eq, q(1, 1)), (a.clone(), Sense::Eq, q(2, 1))],
        };
        let LpOutcome::Infeasible { farkas } = solve(&lp) else { panic!("infeasible expected") };
        let pa = farkas[0].clone() + farkas[1].clone();
        let pb = farkas[0].clone() + farkas[1].clone() * q(2, 1);
        assert!(!Signed::is_positive(&pa));
        assert!(Signed::is_positive(&pb));
    }

    #[test]
    fn unbounded() {
        let lp = LinearProgram { objective: vec![1.0], rows: vec![(vec![-1.0], Sense::Le, 1.0)] };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_rows() {
        // max x, -x >= -3  (x <= 3)
        let lp = LinearProgram { objective: vec![1.0], rows: vec![(vec![-1.0], Sense::Ge, -3.0)] };
        assert_eq!(solve(&lp), LpOutcome::Optimal { x: vec![3.0], value: 3.0 });
    }
}
