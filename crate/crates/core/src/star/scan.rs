//! The ratio inequality over real primes.
//!
//! With `a_n = 1/p_n` the inequality `a_n/a_{n+1} < 1 + (r + eps)/(n ln n)` reads
//! `p_{n+1}/p_n < 1 + (r + eps)/(n ln n)`, i.e. `g_n < c_n` with
//! `c_n = p_n (r + eps)/(n ln n)`. Thresholds are evaluated in double-double with the
//! actual `p_n`; the asymptotic argument later swaps `p_n` for `n ln n`, which the
//! scan does not do.

use serde::{Deserialize, Serialize};

use super::StarError;
use crate::dd::Dd;
use crate::gaps::{gap_stream, HistogramEntry, TailMin};
use crate::sieve::SieveOptions;

/// Relative margin below which a classification is reported as borderline.
pub const BORDERLINE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub r: f64,
    pub epsilon: f64,
    pub n_lo: u64,
}

impl ScanParams {
    pub fn new(r: f64, epsilon: f64) -> Self {
        Self { r, epsilon, n_lo: 2 }
    }

    fn validate(&self) -> Result<(), StarError> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(StarError::Domain(format!("r must be positive, got {}", self.r)));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(StarError::Domain(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.n_lo < 2 {
            return Err(StarError::Singularity(format!("n_lo={}: n ln n vanishes at n = 1", self.n_lo)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanHit {
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    pub g_n: u64,
    /// `c_n = p_n (r + eps)/(n ln n)`; the implied bound is `g_n < c_n`.
    pub threshold: f64,
    /// `(c_n - g_n) / c_n`.
    pub margin: f64,
    pub borderline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub r: f64,
    pub epsilon: f64,
    pub limit: u64,
    /// `(n_lo, n_hi)`: first and last scanned gap index.
    pub range: (u64, u64),
    pub hits: Vec<ScanHit>,
    /// Pairs whose margin is within [`BORDERLINE_MARGIN`] of zero, either side.
    pub borderline: Vec<ScanHit>,
    pub hit_count: u64,
    pub min_gap_among_hits: Option<u64>,
    /// Minimum gap among hits in the upper half of the range, `n >= (n_lo + n_hi) / 2`.
    pub tail_min_gap: Option<u64>,
}

impl ScanReport {
    pub fn tail_start(&self) -> u64 {
        (self.range.0 + self.range.1).div_ceil(2)
    }

    /// Hits and borderline pairs merged in index order.
    pub fn rows(&self) -> Vec<ScanHit> {
        let mut rows: Vec<ScanHit> = self.hits.iter().chain(&self.borderline).copied().collect();
        rows.sort_by_key(|h| h.n);
        rows
    }
}

/// Scans every consecutive pair with `n >= n_lo` and `p_{n+1} <= limit`.
pub fn corollary_scan(params: &ScanParams, limit: u64, opts: &SieveOptions) -> Result<ScanReport, StarError> {
    params.validate()?;
    let coef = Dd::from(params.r) + Dd::from(params.epsilon);
    let mut hits = Vec::new();
    let mut borderline = Vec::new();
    let mut n_hi = None;
    let records = if limit >= 3 { Some(gap_stream(limit, opts)?) } else { None };
    for rec in records.into_iter().flatten().filter(|rec| rec.n >= params.n_lo) {
        n_hi = Some(rec.n);
        let nv = Dd::from_u64(rec.n);
        let c = Dd::from_u64(rec.p_n) * coef / (nv * nv.ln());
        let margin = ((c - Dd::from_u64(rec.g_n)) / c).to_f64();
        let hit = ScanHit {
            n: rec.n,
            p_n: rec.p_n,
            p_next: rec.p_next,
            g_n: rec.g_n,
            threshold: c.to_f64(),
            margin,
            borderline: margin.abs() < BORDERLINE_MARGIN,
        };
        if hit.borderline {
            borderline.push(hit);
        } else if margin > 0.0 {
            hits.push(hit);
        }
    }
    let n_hi = n_hi.ok_or_else(|| {
        StarError::Range(format!("limit {limit} does not contain the prime pair at n_lo = {}", params.n_lo))
    })?;
    let mut report = ScanReport {
        r: params.r,
        epsilon: params.epsilon,
        limit,
        range: (params.n_lo, n_hi),
        hit_count: hits.len() as u64,
        min_gap_among_hits: hits.iter().map(|h| h.g_n).min(),
        tail_min_gap: None,
        hits,
        borderline,
    };
    let tail = report.tail_start();
    report.tail_min_gap = report.hits.iter().filter(|h| h.n >= tail).map(|h| h.g_n).min();
    Ok(report)
}

/// What a finite scan says about `liminf g_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub r: f64,
    pub epsilon: f64,
    pub range: (u64, u64),
    pub hit_count: u64,
    pub borderline_count: u64,
    pub last_hit: Option<u64>,
    pub min_gap_among_hits: Option<u64>,
    pub tail_min_gap: Option<u64>,
    /// Minimum hit gap over `n >= from_n` for dyadic `from_n`.
    pub hit_tail_minima: Vec<TailMin>,
    pub max_threshold: Option<f64>,
    /// Largest threshold among hits in the upper half of the range.
    pub tail_max_threshold: Option<f64>,
    /// `ceil(tail_max_threshold)`.
    pub implied_bound: Option<u64>,
    pub hit_gaps: Vec<HistogramEntry>,
    pub reading: String,
}

pub fn summarize_scan(report: &ScanReport) -> TheoremSummary {
    let tail = report.tail_start();
    let max_threshold = report.hits.iter().map(|h| h.threshold).reduce(f64::max);
    let tail_max_threshold = report.hits.iter().filter(|h| h.n >= tail).map(|h| h.threshold).reduce(f64::max);
    let implied_bound = tail_max_threshold.map(|c| c.ceil() as u64);

    let mut hit_tail_minima = Vec::new();
    let mut k = report.range.0.next_power_of_two();
    while k <= report.range.1 {
        if let Some(min_gap) = report.hits.iter().filter(|h| h.n >= k).map(|h| h.g_n).min() {
            hit_tail_minima.push(TailMin { from_n: k, min_gap });
        }
        k *= 2;
    }

    let mut gaps = std::collections::BTreeMap::<u64, u64>::new();
    for h in &report.hits {
        *gaps.entry(h.g_n).or_default() += 1;
    }
    let last_hit = report.hits.last().map(|h| h.n);
    let reading = match (last_hit, implied_bound) {
        (Some(last), Some(bound)) => format!(
            "finite-range evidence only: hits occur up to n = {last} of {}. if hits continue indefinitely, \
             liminf g_n <= {bound} (ceiling of the largest threshold along the tail hits). thresholds use the \
             actual p_n; the asymptotic argument replaces p_n by n ln n.",
            report.range.1
        ),
        (Some(last), None) => format!(
            "finite-range evidence only: hits occur up to n = {last} but none in the upper half of the range \
             [{}, {}].",
            report.tail_start(),
            report.range.1
        ),
        _ => format!("no hits on [{}, {}]; the scan supplies no gap bound.", report.range.0, report.range.1),
    };
    TheoremSummary {
        r: report.r,
        epsilon: report.epsilon,
        range: report.range,
        hit_count: report.hit_count,
        borderline_count: report.borderline.len() as u64,
        last_hit,
        min_gap_among_hits: report.min_gap_among_hits,
        tail_min_gap: report.tail_min_gap,
        hit_tail_minima,
        max_threshold,
        tail_max_threshold,
        implied_bound,
        hit_gaps: gaps.into_iter().map(|(gap, count)| HistogramEntry { gap, count }).collect(),
        reading,
    }
}

pub fn theorem_gap_bound(params: &ScanParams, limit: u64, opts: &SieveOptions) -> Result<TheoremSummary, StarError> {
    corollary_scan(params, limit, opts).map(|rep| summarize_scan(&rep))
}

/// One summary per `epsilon` in `grid`, same `r` and range.
pub fn epsilon_sweep(
    r: f64,
    grid: &[f64],
    n_lo: u64,
    limit: u64,
    opts: &SieveOptions,
) -> Result<Vec<TheoremSummary>, StarError> {
    grid.iter().map(|&epsilon| theorem_gap_bound(&ScanParams { r, epsilon, n_lo }, limit, opts)).collect()
}
