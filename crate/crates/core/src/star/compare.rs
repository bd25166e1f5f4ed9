//! Second-kind comparison and dyadic summability evidence.
//!
//! `a` dominates `b` in the second-kind sense on a range when
//! `a_n / a_{n+1} >= b_n / b_{n+1}` for every `n` in it. If `sum b` converges and
//! the domination holds on a tail, `sum a` converges; read backwards, a divergent
//! `b` dominating `a` makes `sum a` diverge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ratio::TAIL_WINDOWS;
use super::StarError;
use crate::dd::Dd;
use crate::dsl::{eval_sequence, parse_sequence, SequenceExpr};

/// Convergent yardstick for the summability probe.
pub const CONVERGENT_REFERENCE: &str = "1/(n*ln(n)^2)";
/// Divergent yardstick for the summability probe.
pub const DIVERGENT_REFERENCE: &str = "1/(n*ln(n))";

// fixed chunking keeps reductions identical for every thread count
const CHUNK: u64 = 1 << 12;

fn chunks(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut s = lo;
    while s <= hi {
        let e = (s + CHUNK - 1).min(hi);
        out.push((s, e));
        s = e + 1;
    }
    out
}

fn check_range(n_lo: u64, n_hi: u64) -> Result<(), StarError> {
    if n_lo < 2 {
        return Err(StarError::Singularity(format!("n={n_lo}: comparisons start at n = 2")));
    }
    if n_lo > n_hi {
        return Err(StarError::Range(format!("empty range [{n_lo}, {n_hi}]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonStep {
    pub n: u64,
    pub holds: bool,
}

/// Per-`n` outcomes of `a_n/a_{n+1} >= b_n/b_{n+1}`.
pub struct SecondKindStream<'a> {
    a: &'a SequenceExpr,
    b: &'a SequenceExpr,
    n: u64,
    n_hi: u64,
    // (a_n, b_n) carried from the previous step
    carry: Option<(Dd, Dd)>,
}

impl Iterator for SecondKindStream<'_> {
    type Item = Result<ComparisonStep, StarError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.n > self.n_hi {
            return None;
        }
        let n = self.n;
        let step = (|| {
            let (an, bn) = match self.carry {
                Some(c) => c,
                None => (eval_sequence(self.a, n)?, eval_sequence(self.b, n)?),
            };
            let an1 = eval_sequence(self.a, n + 1)?;
            let bn1 = eval_sequence(self.b, n + 1)?;
            self.carry = Some((an1, bn1));
            Ok(ComparisonStep { n, holds: an / an1 >= bn / bn1 })
        })();
        self.n += 1;
        if step.is_err() {
            self.n = self.n_hi + 1;
        }
        Some(step)
    }
}

pub fn second_kind_stream<'a>(
    a: &'a SequenceExpr,
    b: &'a SequenceExpr,
    n_lo: u64,
    n_hi: u64,
) -> Result<SecondKindStream<'a>, StarError> {
    check_range(n_lo, n_hi)?;
    Ok(SecondKindStream { a, b, n: n_lo, n_hi, carry: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub a: String,
    pub b: String,
    pub n_lo: u64,
    pub n_hi: u64,
    pub violations: u64,
    pub first_violation: Option<u64>,
    /// `true` when the domination holds at every `n` in the range.
    pub holds: bool,
}

/// Checks `a_n/a_{n+1} >= b_n/b_{n+1}` on `[n_lo, n_hi]`.
pub fn second_kind_compare(
    a: &SequenceExpr,
    b: &SequenceExpr,
    n_lo: u64,
    n_hi: u64,
) -> Result<ComparisonSummary, StarError> {
    check_range(n_lo, n_hi)?;
    let parts = chunks(n_lo, n_hi)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut violations = 0u64;
            let mut first = None;
            for step in second_kind_stream(a, b, lo, hi)? {
                let step = step?;
                if !step.holds {
                    violations += 1;
                    first.get_or_insert(step.n);
                }
            }
            Ok((violations, first))
        })
        .collect::<Vec<Result<(u64, Option<u64>), StarError>>>();
    let mut violations = 0;
    let mut first_violation = None;
    for part in parts {
        let (v, f) = part?;
        violations += v;
        if first_violation.is_none() {
            first_violation = f;
        }
    }
    Ok(ComparisonSummary {
        a: a.to_string(),
        b: b.to_string(),
        n_lo,
        n_hi,
        violations,
        first_violation,
        holds: violations == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub n: u64,
    pub sum: f64,
}

/// Sum of `b` over `(from, to]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Increment {
    pub from: u64,
    pub to: u64,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSums {
    pub partial_sums: Vec<PartialSum>,
    pub increments: Vec<Increment>,
    increment_values: Vec<Dd>,
}

impl DyadicSums {
    pub fn increment_values(&self) -> &[Dd] {
        &self.increment_values
    }
}

fn range_sum(b: &SequenceExpr, lo: u64, hi: u64) -> Result<Dd, StarError> {
    let parts = chunks(lo, hi)
        .into_par_iter()
        .map(|(s, e)| (s..=e).try_fold(Dd::ZERO, |acc, n| Ok::<_, StarError>(acc + eval_sequence(b, n)?)))
        .collect::<Vec<_>>();
    parts.into_iter().try_fold(Dd::ZERO, |acc, p| Ok(acc + p?))
}

/// Partial sums of `b` from `n_lo` at each power of two in `[n_lo, n_hi]` (and at
/// `n_hi`), and the increments over consecutive dyadic blocks.
pub fn dyadic_increments(b: &SequenceExpr, n_lo: u64, n_hi: u64) -> Result<DyadicSums, StarError> {
    check_range(n_lo, n_hi)?;
    let mut marks: Vec<u64> = super::ratio::dyadic_points(n_lo, n_hi);
    if marks.last() != Some(&n_hi) {
        marks.push(n_hi);
    }
    let mut partial_sums = Vec::new();
    let mut increments = Vec::new();
    let mut increment_values = Vec::new();
    let mut total = Dd::ZERO;
    let mut prev = n_lo - 1;
    for &m in &marks {
        let block = range_sum(b, prev + 1, m)?;
        total += block;
        partial_sums.push(PartialSum { n: m, sum: total.to_f64() });
        // only whole dyadic blocks count as increments
        if prev.is_power_of_two() && m == 2 * prev && prev >= n_lo {
            increments.push(Increment { from: prev, to: m, sum: block.to_f64() });
            increment_values.push(block);
        }
        prev = m;
    }
    Ok(DyadicSums { partial_sums, increments, increment_values })
}

/// `true` when every consecutive pair satisfies `next * factor <= prev`.
pub fn shrinks_geometrically(values: &[Dd], factor: f64) -> bool {
    values.windows(2).all(|w| w[1] * Dd::from(factor) <= w[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergingEvidence,
    DivergingEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityVerdict {
    pub verdict: Verdict,
    pub n_lo: u64,
    pub n_max: u64,
    pub partial_sums: Vec<PartialSum>,
    pub increments: Vec<Increment>,
    /// Trailing dyadic increments strictly decrease.
    pub increments_shrinking: bool,
    /// `b` against the convergent reference on the tail (`b` dominating).
    pub convergent_reference: ComparisonSummary,
    /// The divergent reference against `b` on the tail (reference dominating).
    pub divergent_reference: ComparisonSummary,
    pub heuristic: String,
}

fn heuristic_text(tail_lo: u64, n_max: u64) -> String {
    format!(
        "evidence, not proof. converging-evidence: the last {TAIL_WINDOWS} dyadic increments strictly decrease \
         and b_n/b_(n+1) >= c_n/c_(n+1) for all n in [{tail_lo}, {n_max}] with c_n = {CONVERGENT_REFERENCE}. \
         diverging-evidence: the increments do not decrease, or d_n/d_(n+1) >= b_n/b_(n+1) for all n in \
         [{tail_lo}, {n_max}] with d_n = {DIVERGENT_REFERENCE}. otherwise inconclusive."
    )
}

/// Summability evidence for `b` over `[2, n_max]`.
pub fn summability_probe(b: &SequenceExpr, n_max: u64) -> Result<SummabilityVerdict, StarError> {
    summability_probe_range(b, 2, n_max)
}

/// Summability evidence for `b` over `[n_lo, n_max]`; `n_max >= 2^10`.
pub fn summability_probe_range(b: &SequenceExpr, n_lo: u64, n_max: u64) -> Result<SummabilityVerdict, StarError> {
    if n_max < 1 << 10 {
        return Err(StarError::Domain(format!("summability probe needs n_max >= 1024, got {n_max}")));
    }
    check_range(n_lo, n_max)?;
    let sums = dyadic_increments(b, n_lo, n_max)?;
    let inc = sums.increment_values();
    let t = &inc[inc.len().saturating_sub(TAIL_WINDOWS + 1)..];
    let increments_shrinking = t.len() >= 2 && t.windows(2).all(|w| w[1] < w[0]);

    let conv = parse_sequence(CONVERGENT_REFERENCE).expect("reference parses");
    let div = parse_sequence(DIVERGENT_REFERENCE).expect("reference parses");
    let tail_lo = (n_max / 2).max(n_lo);
    let convergent_reference = second_kind_compare(b, &conv, tail_lo, n_max)?;
    let divergent_reference = second_kind_compare(&div, b, tail_lo, n_max)?;

    let converging = increments_shrinking && convergent_reference.holds;
    let diverging = !increments_shrinking || divergent_reference.holds;
    let verdict = match (converging, diverging) {
        (true, false) => Verdict::ConvergingEvidence,
        (false, true) => Verdict::DivergingEvidence,
        _ => Verdict::Inconclusive,
    };
    Ok(SummabilityVerdict {
        verdict,
        n_lo,
        n_max,
        partial_sums: sums.partial_sums,
        increments: sums.increments,
        increments_shrinking,
        convergent_reference,
        divergent_reference,
        heuristic: heuristic_text(tail_lo, n_max),
    })
}
