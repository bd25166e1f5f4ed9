use serde::{Deserialize, Serialize};

use super::compare::{summability_probe_range, SummabilityVerdict, Verdict};
use super::ratio::{ratio_diagnostics, RatioDiagnostics, Trend};
use super::StarError;
use crate::dsl::SequenceExpr;

/// Both axes of the ratio condition for one `(b, r)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub expression: String,
    pub r: f64,
    pub n0: u64,
    pub n_max: u64,
    pub ratio: RatioDiagnostics,
    /// max `|e_n - r|` over the dyadic samples.
    pub max_abs_deviation: f64,
    /// `e_n - r` shrinks geometrically over the trailing dyadic windows.
    pub ratio_axis_pass: bool,
    pub summability: SummabilityVerdict,
    pub summability_axis_pass: bool,
    /// Both axes pass. Finite-range evidence only.
    pub candidate: bool,
}

pub fn star_check(b: &SequenceExpr, r: f64, n0: u64, n_max: u64) -> Result<StarReport, StarError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(StarError::Domain(format!("r must be positive, got {r}")));
    }
    if n0 < 2 {
        return Err(StarError::Singularity(format!("n0={n0}: n ln n vanishes at n = 1")));
    }
    if n0 >= n_max {
        return Err(StarError::Range(format!("need n0 < n_max, got n0={n0}, n_max={n_max}")));
    }
    let ratio = ratio_diagnostics(b, n0, n_max, Some(r))?;
    let summability = summability_probe_range(b, n0, n_max)?;
    let max_abs_deviation = ratio.samples.iter().map(|s| (s.e_n - r).abs()).fold(0.0, f64::max);
    let ratio_axis_pass = ratio.remainder_trend == Trend::Shrinking;
    let summability_axis_pass = summability.verdict == Verdict::ConvergingEvidence;
    Ok(StarReport {
        expression: b.to_string(),
        r,
        n0,
        n_max,
        ratio,
        max_abs_deviation,
        ratio_axis_pass,
        summability_axis_pass,
        candidate: ratio_axis_pass && summability_axis_pass,
        summability,
    })
}
