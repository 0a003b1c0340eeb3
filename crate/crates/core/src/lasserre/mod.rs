//! Lasserre hierarchy over the rainbow matching relaxation at desk scale.

pub mod krm;
pub mod moment;
pub mod sdp;
pub mod simplex;
pub mod solve;
pub mod stab;
pub mod suites;

use thiserror::Error;

pub use krm::{build_krm, lp_optimize, lp_optimize_exact, LpRelaxation, LpRow, RowKind};
pub use moment::{
    check_rank_closure, condition, condition_on_set, moment_matrix, psd_check, slack_moment_matrix, Conditioning,
    MomentVector, PsdCheckReport, RankClosureReport,
};
pub use sdp::SdpResiduals;
pub use solve::{lasserre_optimize, LasserreSolution};
pub use suites::{measure_gap, run_suite, GapReport, Suite, SuiteReport};
pub use stab::{check_h_perfect, check_scaling_bound, gen_h_perfect, stab_membership, HPerfectReport, ScalingReport, StabMembership};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LasserreError {
    #[error("{what}: {found} exceeds the limit of {limit}")]
    TooLarge { what: &'static str, found: usize, limit: usize },
    #[error("weight vector has {found} entries for {expected} variables")]
    WeightLength { expected: usize, found: usize },
    #[error("linear program: {0}")]
    Lp(String),
    #[error("moment vector has no value for subset {0:?}")]
    MissingSubset(Vec<usize>),
    #[error("{0}")]
    Level(String),
    #[error("SDP solver did not converge after {iterations} iterations: {residuals:?}")]
    NonConvergence { iterations: usize, residuals: SdpResiduals },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Precondition(String),
}
