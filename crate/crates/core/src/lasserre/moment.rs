//! Moment vectors, moment and slack matrices, conditioning.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::krm::LpRow;
use super::LasserreError;
use crate::graph::PlainGraph;
use crate::recognition::for_each_combination;
use crate::rm::mwis_bruteforce;

pub fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &i| m | 1 << i)
}

pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Subsets of `0..n` with at most `max_size` elements, by size then lexicographically.
pub fn graded_lex_subsets(n: usize, max_size: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for size in 0..=max_size.min(n) {
        for_each_combination(n, size, |s| {
            out.push(mask_of(s));
            true
        });
    }
    out
}

/// Pseudo-moments `y_I` for all `I ⊆ [n]` with `|I| <= 2t+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    n: usize,
    level: usize,
    values: HashMap<u64, f64>,
}

impl MomentVector {
    pub fn max_size(level: usize) -> usize {
        2 * level + 1
    }

    pub fn from_values(n: usize, level: usize, values: HashMap<u64, f64>) -> Self {
        Self { n, level, values }
    }

    /// Moments of a probability distribution over subsets: `y_I = P(I ⊆ S)`.
    pub fn from_distribution(n: usize, level: usize, dist: &[(u64, f64)]) -> Self {
        let values = graded_lex_subsets(n, Self::max_size(level))
            .into_iter()
            .map(|i| (i, dist.iter().filter(|(s, _)| s & i == i).map(|(_, p)| p).sum()))
            .collect();
        Self { n, level, values }
    }

    /// Moments of the point mass on one set.
    pub fn from_indicator(n: usize, level: usize, set: &[usize]) -> Self {
        Self::from_distribution(n, level, &[(mask_of(set), 1.0)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn get(&self, mask: u64) -> Option<f64> {
        self.values.get(&mask).copied()
    }

    fn require(&self, mask: u64) -> Result<f64, LasserreError> {
        self.get(mask).ok_or_else(|| LasserreError::MissingSubset(members(mask)))
    }

    pub fn singleton(&self, i: usize) -> f64 {
        self.get(1 << i).unwrap_or(0.0)
    }

    pub fn singletons(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.singleton(i)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

/// `(M_t(y))_{I,J} = y_{I∪J}` over `|I|, |J| <= t`.
pub fn moment_matrix(y: &MomentVector, t: usize) -> Result<DMatrix<f64>, LasserreError> {
    let index = graded_lex_subsets(y.n, t);
    let d = index.len();
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let v = y.require(index[a] | index[b])?;
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(m)
}

/// `(M_t^ℓ(y))_{I,J} = Σ_i a_i y_{I∪J∪{i}} − b y_{I∪J}` for the row `a·x >= b`.
pub fn slack_moment_matrix(y: &MomentVector, row: &LpRow, t: usize) -> Result<DMatrix<f64>, LasserreError> {
    let index = graded_lex_subsets(y.n, t);
    let d = index.len();
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let base = index[a] | index[b];
            let mut v = -(row.rhs as f64) * y.require(base)?;
            for &(i, c) in &row.coeffs {
                v += c as f64 * y.require(base | 1 << i)?;
            }
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdCheckReport {
    pub matrix: String,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn psd_check(id: impl Into<String>, m: &DMatrix<f64>, tolerance: f64) -> PsdCheckReport {
    let min = min_eigenvalue(m);
    PsdCheckReport { matrix: id.into(), min_eigenvalue: min, tolerance, pass: min >= -tolerance }
}

/// `y = λ0·y0 + λ1·y1` with `y1` integral at 1 and `y0` integral at 0 on
/// the conditioned variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditioning {
    pub variable: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub y0: Option<MomentVector>,
    pub y1: Option<MomentVector>,
}

const DEGENERATE: f64 = 1e-12;

/// Conditions `y` on variable `i`. Branches live one level down and are
/// defined on all subsets of size at most `2t`.
pub fn condition(y: &MomentVector, i: usize) -> Result<Conditioning, LasserreError> {
    if y.level == 0 {
        return Err(LasserreError::Level("conditioning needs level at least 1".into()));
    }
    let yi = y.require(1 << i)?;
    let masks = graded_lex_subsets(y.n, 2 * y.level);
    let branch = |f: &dyn Fn(u64) -> Result<f64, LasserreError>| -> Result<MomentVector, LasserreError> {
        let values = masks.iter().map(|&m| f(m).map(|v| (m, v))).collect::<Result<_, _>>()?;
        Ok(MomentVector { n: y.n, level: y.level - 1, values })
    };
    let y1 = if yi > DEGENERATE {
        Some(branch(&|m| Ok(y.require(m | 1 << i)? / yi))?)
    } else {
        None
    };
    let y0 = if yi < 1.0 - DEGENERATE {
        Some(branch(&|m| Ok((y.require(m)? - y.require(m | 1 << i)?) / (1.0 - yi)))?)
    } else {
        None
    };
    Ok(Conditioning {
        variable: i,
        lambda0: if y0.is_some() { 1.0 - yi } else { 0.0 },
        lambda1: if y1.is_some() { yi } else { 0.0 },
        y0,
        y1,
    })
}

impl Conditioning {
    /// Largest `|λ0·y0_I + λ1·y1_I − y_I|` over `|I| <= 2t−1`.
    pub fn reconstruction_error(&self, y: &MomentVector) -> f64 {
        graded_lex_subsets(y.n, 2 * y.level - 1)
            .into_iter()
            .map(|m| {
                let part = |b: &Option<MomentVector>, l: f64| b.as_ref().map_or(0.0, |v| l * v.get(m).unwrap());
                (part(&self.y0, self.lambda0) + part(&self.y1, self.lambda1) - y.get(m).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn branches(&self) -> Vec<(f64, &MomentVector)> {
        [(self.lambda0, &self.y0), (self.lambda1, &self.y1)]
            .into_iter()
            .filter_map(|(l, b)| b.as_ref().map(|v| (l, v)))
            .collect()
    }
}

/// Conditions on each variable of `set` in turn, returning all leaves.
pub fn condition_on_set(y: &MomentVector, set: &[usize]) -> Result<Vec<(f64, MomentVector)>, LasserreError> {
    let mut leaves = vec![(1.0, y.clone())];
    for &i in set {
        let mut next = Vec::new();
        for (weight, v) in leaves {
            let c = condition(&v, i)?;
            for (l, b) in c.branches() {
                next.push((weight * l, b.clone()));
            }
        }
        leaves = next;
    }
    Ok(leaves)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankClosureReport {
    pub set: Vec<usize>,
    pub alpha: u64,
    pub mass: f64,
    pub pass: bool,
}

/// Checks `Σ_{v∈U} y_v <= α(H[U])` with the stability number by brute force.
pub fn check_rank_closure(y: &MomentVector, set: &[usize], h: &PlainGraph) -> Result<RankClosureReport, LasserreError> {
    let sub = h.induced(set);
    let (alpha, _) = mwis_bruteforce(&sub, &vec![1; set.len()]).map_err(|e| LasserreError::Numerical(e.to_string()))?;
    let mass: f64 = set.iter().map(|&v| y.singleton(v)).sum();
    Ok(RankClosureReport { set: set.to_vec(), alpha, mass, pass: mass <= alpha as f64 + 1e-7 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasserre::krm::{LpRow, RowKind};

    #[test]
    fn rank_one_moment_matrix() {
        let y = MomentVector::from_indicator(3, 1, &[0, 2]);
        let m = moment_matrix(&y, 1).unwrap();
        let z = nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0, 1.0]);
        assert_eq!(m, &z * z.transpose());
        assert!(psd_check("moment", &m, 1e-9).pass);
    }

    #[test]
    fn product_moments() {
        let dist: Vec<(u64, f64)> = vec![(0b00, 0.25), (0b01, 0.25), (0b10, 0.25), (0b11, 0.25)];
        let y = MomentVector::from_distribution(2, 1, &dist);
        let m = moment_matrix(&y, 1).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.5, 0.5, 0.5, 0.25, 0.5, 0.25, 0.5]);
        assert_eq!(m, expected);
    }

    #[test]
    fn tight_row_gives_zero_slack() {
        let y = MomentVector::from_indicator(2, 1, &[0]);
        let row = LpRow { kind: RowKind::Vertex(0), coeffs: vec![(0, -1), (1, -1)], rhs: -1 };
        let s = slack_moment_matrix(&y, &row, 1).unwrap();
        assert!(s.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn conditioning_identity() {
        let dist = vec![(0b001, 0.3), (0b010, 0.2), (0b100, 0.1), (0b101, 0.4)];
        let y = MomentVector::from_distribution(3, 2, &dist);
        let c = condition(&y, 0).unwrap();
        assert!(c.reconstruction_error(&y) < 1e-12);
        assert!((c.y1.as_ref().unwrap().singleton(0) - 1.0).abs() < 1e-12);
        assert!(c.y0.as_ref().unwrap().singleton(0).abs() < 1e-12);
        let integral = MomentVector::from_indicator(3, 1, &[1]);
        let c = condition(&integral, 1).unwrap();
        assert!(c.y0.is_none());
        assert_eq!(c.y1.as_ref().unwrap().get(0b010), Some(1.0));
    }

    #[test]
    fn missing_subset_is_reported() {
        let y = MomentVector::from_indicator(3, 0, &[1]);
        assert!(matches!(moment_matrix(&y, 1), Err(LasserreError::MissingSubset(_))));
    }
}
