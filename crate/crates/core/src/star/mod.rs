//! Ratio-condition analysis of candidate sequences and the prime-ratio scan.
//!
//! A pair `(b, r)` is examined along two independent axes:
//!
//! * the ratio axis: does `e_n = n ln n (b_n / b_{n+1} - 1)` settle at `r`?
//! * the summability axis: does `sum b_n` look convergent?
//!
//! Both are finite-range heuristics sampled at dyadic `n`; reports say "evidence",
//! never "proof". The prime scan instantiates the ratio inequality at
//! `a_n = 1/p_n`, replacing the little-o term by an explicit slack `epsilon`.

mod check;
mod compare;
mod ratio;
mod scan;

use crate::dsl::EvalError;
use crate::gaps::GapError;

pub use check::{star_check, StarReport};
pub use compare::{
    dyadic_increments, second_kind_compare, second_kind_stream, shrinks_geometrically, summability_probe,
    summability_probe_range, ComparisonStep, ComparisonSummary, DyadicSums, Increment, PartialSum, SecondKindStream,
    SummabilityVerdict, Verdict, CONVERGENT_REFERENCE, DIVERGENT_REFERENCE,
};
pub use ratio::{
    dyadic_points, estimate_r, ratio_diagnostics, ratio_excess, ratio_excess_dd, ExtrapolationRow, REstimate,
    RatioDiagnostics, RatioSample, Trend, DECAY_FACTOR, TAIL_WINDOWS,
};
pub use scan::{
    corollary_scan, epsilon_sweep, summarize_scan, theorem_gap_bound, ScanHit, ScanParams, ScanReport, TheoremSummary,
    BORDERLINE_MARGIN,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StarError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("range error: {0}")]
    Range(String),
    #[error(transparent)]
    Gaps(#[from] GapError),
}
