//! Dense primal-dual interior point method for small block SDPs of the form
//! `maximize b·y` subject to `F0 + Σ y_i F_i ⪰ 0` blockwise.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

/// Upper-triangular entries `(p, q, v)` with `p <= q` of a symmetric matrix.
pub type SparseSym = Vec<(usize, usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct SdpBlock {
    pub dim: usize,
    pub constant: SparseSym,
    /// `(variable, F_i)` for the variables that occur in this block.
    pub terms: Vec<(usize, SparseSym)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub objective: Vec<f64>,
    pub blocks: Vec<SdpBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdpResiduals {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    pub value: f64,
    pub primal_value: f64,
    pub iterations: usize,
    pub residuals: SdpResiduals,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SdpFailure {
    NotConverged { iterations: usize, residuals: SdpResiduals },
    Numerical { iterations: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 200, step_fraction: 0.95 }
    }
}

fn dense(dim: usize, s: &SparseSym) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for &(p, q, v) in s {
        m[(p, q)] += v;
        if p != q {
            m[(q, p)] += v;
        }
    }
    m
}

/// `tr(S·D)` for symmetric sparse `S`.
fn trace_with(s: &SparseSym, d: &DMatrix<f64>) -> f64 {
    s.iter()
        .map(|&(p, q, v)| if p == q { v * d[(p, p)] } else { v * (d[(p, q)] + d[(q, p)]) })
        .sum()
}

fn full_entries(s: &SparseSym) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(2 * s.len());
    for &(p, q, v) in s {
        out.push((p, q, v));
        if p != q {
            out.push((q, p, v));
        }
    }
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Largest `α` with `X + α·D ⪰ 0` (infinite if every direction is allowed).
fn max_step(x: &DMatrix<f64>, d: &DMatrix<f64>) -> Option<f64> {
    let l = Cholesky::new(x.clone())?.l();
    let a = l.solve_lower_triangular(d)?;
    let mut s = l.solve_lower_triangular(&a.transpose())?;
    symmetrize(&mut s);
    let min = SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Some(if min >= 0.0 { f64::INFINITY } else { -1.0 / min })
}

struct BlockState {
    c: DMatrix<f64>,
    terms: Vec<(usize, SparseSym, SparseSym)>,
}

/// Solves the SDP by an infeasible-start primal-dual method with the HKM
/// direction and Mehrotra's predictor-corrector. `F_i` enters as `A_i = −F_i`
/// in the standard dual form `C − Σ y_i A_i ⪰ 0`.
pub fn solve_sdp(problem: &SdpProblem, settings: SdpSettings) -> Result<SdpSolution, SdpFailure> {
    let m = problem.objective.len();
    let b = DVector::from_vec(problem.objective.clone());
    let blocks: Vec<BlockState> = problem
        .blocks
        .iter()
        .map(|blk| BlockState {
            c: dense(blk.dim, &blk.constant),
            terms: blk.terms.iter().map(|(i, f)| (*i, f.clone(), full_entries(f))).collect(),
        })
        .collect();
    let total_dim: usize = problem.blocks.iter().map(|b| b.dim).sum();
    let c_norm = blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>().sqrt();
    let b_norm = b.norm();

    let mut x: Vec<DMatrix<f64>> = problem.blocks.iter().map(|b| DMatrix::identity(b.dim, b.dim)).collect();
    let mut z: Vec<DMatrix<f64>> = x.clone();
    let mut y = DVector::<f64>::zeros(m);
    let numerical = |iterations: usize, message: &str| SdpFailure::Numerical { iterations, message: message.into() };

    let mut residuals = SdpResiduals { primal_infeasibility: f64::INFINITY, dual_infeasibility: f64::INFINITY, relative_gap: f64::INFINITY };
    for iter in 0..settings.max_iterations {
        // tr(A_i X) = −tr(F_i X)
        let mut tr_ax = DVector::<f64>::zeros(m);
        for (blk, xk) in blocks.iter().zip(&x) {
            for (i, f, _) in &blk.terms {
                tr_ax[*i] -= trace_with(f, xk);
            }
        }
        let rp = &b - &tr_ax;
        // Rd = C − Z − Σ y_i A_i = C − Z + Σ y_i F_i
        let rd: Vec<DMatrix<f64>> = blocks
            .iter()
            .zip(&z)
            .map(|(blk, zk)| {
                let mut r = &blk.c - zk;
                for (i, _, full) in &blk.terms {
                    for &(p, q, v) in full {
                        r[(p, q)] += y[*i] * v;
                    }
                }
                r
            })
            .collect();
        let primal: f64 = blocks.iter().zip(&x).map(|(blk, xk)| blk.c.component_mul(xk).sum()).sum();
        let dual = b.dot(&y);
        let mu = x.iter().zip(&z).map(|(xk, zk)| xk.component_mul(zk).sum()).sum::<f64>() / total_dim as f64;
        residuals = SdpResiduals {
            primal_infeasibility: rp.norm() / (1.0 + b_norm),
            dual_infeasibility: rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + c_norm),
            relative_gap: (primal - dual).abs() / (1.0 + primal.abs() + dual.abs()),
        };
        if residuals.primal_infeasibility < settings.tolerance
            && residuals.dual_infeasibility < settings.tolerance
            && residuals.relative_gap < settings.tolerance
        {
            return Ok(SdpSolution { y: y.iter().copied().collect(), value: dual, primal_value: primal, iterations: iter, residuals });
        }

        let w: Vec<DMatrix<f64>> = z
            .iter()
            .map(|zk| {
                let mut inv = Cholesky::new(zk.clone()).map(|c| c.inverse()).ok_or_else(|| numerical(iter, "Z lost definiteness"))?;
                symmetrize(&mut inv);
                Ok(inv)
            })
            .collect::<Result<_, SdpFailure>>()?;

        // Schur complement M_ij = Σ_k tr(A_i X A_j W) = Σ_k tr(F_i X F_j W)
        let partial: Vec<DMatrix<f64>> = blocks
            .par_iter()
            .zip(x.par_iter())
            .zip(w.par_iter())
            .map(|((blk, xk), wk)| {
                let mut mk = DMatrix::<f64>::zeros(m, m);
                for (a, (i, _, fi)) in blk.terms.iter().enumerate() {
                    for (j, _, fj) in &blk.terms[a..] {
                        let mut s = 0.0;
                        for &(p, q, u) in fi {
                            for &(r, t, v) in fj {
                                s += u * v * xk[(q, r)] * wk[(t, p)];
                            }
                        }
                        mk[(*i, *j)] += s;
                        if i != j {
                            mk[(*j, *i)] += s;
                        }
                    }
                }
                mk
            })
            .collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for mk in &partial {
            schur += mk;
        }
        let factor = Cholesky::new(schur.clone());
        let lu = schur.clone().lu();
        let solve_schur = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
            match &factor {
                Some(c) => Some(c.solve(rhs)),
                None => lu.solve(rhs),
            }
        };

        // tr(A_i D) = −tr(F_i D) summed over blocks
        let trace_a = |mats: &[DMatrix<f64>]| -> DVector<f64> {
            let mut out = DVector::<f64>::zeros(m);
            for (blk, d) in blocks.iter().zip(mats) {
                for (i, f, _) in &blk.terms {
                    out[*i] -= trace_with(f, d);
                }
            }
            out
        };
        let xrdw: Vec<DMatrix<f64>> = x.iter().zip(&rd).zip(&w).map(|((xk, r), wk)| xk * r * wk).collect();
        let tr_xrdw = trace_a(&xrdw);
        let tr_w = trace_a(&w);

        let directions = |dy: &DVector<f64>, sigma_mu: f64, second: Option<&[DMatrix<f64>]>| {
            let mut dxs = Vec::with_capacity(blocks.len());
            let mut dzs = Vec::with_capacity(blocks.len());
            for (k, blk) in blocks.iter().enumerate() {
                let mut dz = rd[k].clone();
                for (i, _, full) in &blk.terms {
                    for &(p, q, v) in full {
                        dz[(p, q)] += dy[*i] * v;
                    }
                }
                let mut dx = &w[k] * sigma_mu - &x[k] - &x[k] * &dz * &w[k];
                if let Some(e) = second {
                    dx -= &e[k] * &w[k];
                }
                symmetrize(&mut dx);
                dxs.push(dx);
                dzs.push(dz);
            }
            (dxs, dzs)
        };
        let steps = |dxs: &[DMatrix<f64>], dzs: &[DMatrix<f64>]| -> Option<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for k in 0..blocks.len() {
                ap = ap.min(max_step(&x[k], &dxs[k])?);
                ad = ad.min(max_step(&z[k], &dzs[k])?);
            }
            Some(((settings.step_fraction * ap).min(1.0), (settings.step_fraction * ad).min(1.0)))
        };

        // predictor
        let rhs = &b + &tr_xrdw;
        let dy_a = solve_schur(&rhs).ok_or_else(|| numerical(iter, "singular Schur complement"))?;
        let (dx_a, dz_a) = directions(&dy_a, 0.0, None);
        let (ap, ad) = steps(&dx_a, &dz_a).ok_or_else(|| numerical(iter, "step length failed"))?;
        let mu_aff = (0..blocks.len())
            .map(|k| (&x[k] + &dx_a[k] * ap).component_mul(&(&z[k] + &dz_a[k] * ad)).sum())
            .sum::<f64>()
            / total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let second: Vec<DMatrix<f64>> = dx_a.iter().zip(&dz_a).map(|(a, b)| a * b).collect();
        let sw: Vec<DMatrix<f64>> = second.iter().zip(&w).map(|(e, wk)| e * wk).collect();
        let rhs = &b - &tr_w * (sigma * mu) + &tr_xrdw + trace_a(&sw);
        let dy = solve_schur(&rhs).ok_or_else(|| numerical(iter, "singular Schur complement"))?;
        let (dxs, dzs) = directions(&dy, sigma * mu, Some(&second));
        let (ap, ad) = steps(&dxs, &dzs).ok_or_else(|| numerical(iter, "step length failed"))?;
        for k in 0..blocks.len() {
            x[k] += &dxs[k] * ap;
            z[k] += &dzs[k] * ad;
            symmetrize(&mut x[k]);
            symmetrize(&mut z[k]);
        }
        y += &dy * ad;
    }
    Err(SdpFailure::NotConverged { iterations: settings.max_iterations, residuals })
}
