use serde::{Deserialize, Serialize};

use super::StarError;
use crate::dd::Dd;
use crate::dsl::{eval_sequence, SequenceExpr};

/// Minimum shrink factor per doubling accepted as geometric decay.
pub const DECAY_FACTOR: f64 = 1.5;
/// Number of trailing dyadic differences every tail test looks at.
pub const TAIL_WINDOWS: usize = 4;

fn singular(n: u64) -> StarError {
    StarError::Singularity(format!("n={n}: n ln n vanishes at n = 1"))
}

/// `e_n = n ln n (b_n / b_{n+1} - 1)` in double-double.
pub fn ratio_excess_dd(b: &SequenceExpr, n: u64) -> Result<Dd, StarError> {
    if n < 2 {
        return Err(singular(n));
    }
    let bn = eval_sequence(b, n)?;
    let bn1 = eval_sequence(b, n + 1)?;
    let nv = Dd::from_u64(n);
    Ok(nv * nv.ln() * (bn / bn1 - Dd::ONE))
}

pub fn ratio_excess(b: &SequenceExpr, n: u64) -> Result<f64, StarError> {
    ratio_excess_dd(b, n).map(Dd::to_f64)
}

/// Powers of two in `[lo, hi]`.
pub fn dyadic_points(lo: u64, hi: u64) -> Vec<u64> {
    (0..64).map(|k| 1u64 << k).filter(|&p| p >= lo && p <= hi).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Shrinking,
    Flat,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum REstimate {
    Converged { value: f64 },
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub n: u64,
    pub e_n: f64,
}

/// One dyadic row: the sample, its difference from the previous row, the decay
/// factor `|d_prev| / |d|` and a first-order Richardson value `2 e_n - e_{n/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationRow {
    pub n: u64,
    pub e_n: f64,
    pub diff: Option<f64>,
    pub decay: Option<f64>,
    pub richardson: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioDiagnostics {
    pub n_lo: u64,
    pub n_hi: u64,
    pub samples: Vec<RatioSample>,
    pub r_estimate: REstimate,
    pub r_extrapolation_table: Vec<ExtrapolationRow>,
    /// `r` the remainder `e_n - r` is measured against, if any.
    pub remainder_reference: Option<f64>,
    pub remainder_trend: Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tail {
    Settling,
    Unbounded,
    Unclear,
}

fn tail<T: Copy>(values: &[T]) -> &[T] {
    &values[values.len().saturating_sub(TAIL_WINDOWS + 1)..]
}

/// Settling: trailing differences shrink by [`DECAY_FACTOR`] per doubling.
/// Unbounded: they keep one sign and do not decay geometrically.
fn classify(values: &[Dd]) -> Tail {
    let t = tail(values);
    if t.len() < 3 {
        return Tail::Unclear;
    }
    let diffs: Vec<Dd> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let settling = diffs.windows(2).all(|d| {
        let (prev, cur) = (d[0].abs(), d[1].abs());
        cur.is_zero() || cur * Dd::from(DECAY_FACTOR) <= prev
    });
    if settling {
        return Tail::Settling;
    }
    let same_sign = diffs.iter().all(|d| !d.is_zero() && d.is_sign_negative() == diffs[0].is_sign_negative());
    let persistent = diffs.windows(2).all(|d| d[1].abs() * Dd::from(DECAY_FACTOR) > d[0].abs());
    if same_sign && persistent {
        Tail::Unbounded
    } else {
        Tail::Unclear
    }
}

fn trend_against(values: &[Dd], r: Dd) -> Trend {
    let rem: Vec<Dd> = tail(values).iter().map(|&e| (e - r).abs()).collect();
    if rem.len() < 2 {
        return Trend::Flat;
    }
    let shrinking = rem.windows(2).all(|w| w[1].is_zero() || w[1] * Dd::from(DECAY_FACTOR) <= w[0]);
    if shrinking {
        return Trend::Shrinking;
    }
    let rising = rem.windows(2).all(|w| w[1] > w[0]);
    if rising && classify(&rem) == Tail::Unbounded {
        Trend::Growing
    } else {
        Trend::Flat
    }
}

/// Samples `e_n` at the powers of two in `[n_lo, n_hi]` and classifies the tail.
pub fn ratio_diagnostics(
    b: &SequenceExpr,
    n_lo: u64,
    n_hi: u64,
    reference: Option<f64>,
) -> Result<RatioDiagnostics, StarError> {
    if n_lo < 2 {
        return Err(singular(n_lo));
    }
    if n_lo > n_hi {
        return Err(StarError::Range(format!("empty range [{n_lo}, {n_hi}]")));
    }
    let points = dyadic_points(n_lo, n_hi);
    let values = points.iter().map(|&n| ratio_excess_dd(b, n)).collect::<Result<Vec<Dd>, _>>()?;

    let samples = points.iter().zip(&values).map(|(&n, e)| RatioSample { n, e_n: e.to_f64() }).collect();
    let mut table = Vec::with_capacity(points.len());
    for (i, (&n, &e)) in points.iter().zip(&values).enumerate() {
        let diff = (i > 0).then(|| e - values[i - 1]);
        let decay = (i > 1)
            .then(|| {
                let prev = (values[i - 1] - values[i - 2]).abs();
                let cur = diff.unwrap_or_default().abs();
                (!cur.is_zero()).then(|| (prev / cur).to_f64())
            })
            .flatten();
        let richardson = (i > 0).then(|| (e.ldexp(1) - values[i - 1]).to_f64());
        table.push(ExtrapolationRow { n, e_n: e.to_f64(), diff: diff.map(Dd::to_f64), decay, richardson });
    }

    let r_estimate = match classify(&values) {
        Tail::Settling => REstimate::Converged { value: values.last().map_or(0.0, |v| v.to_f64()) },
        Tail::Unbounded => REstimate::Divergent,
        Tail::Unclear => REstimate::Inconclusive,
    };
    let remainder_reference = reference.or(match r_estimate {
        REstimate::Converged { value } => Some(value),
        _ => None,
    });
    let remainder_trend = match (remainder_reference, r_estimate) {
        (Some(r), _) => trend_against(&values, Dd::from(r)),
        (None, REstimate::Divergent) => Trend::Growing,
        (None, _) => Trend::Flat,
    };
    Ok(RatioDiagnostics {
        n_lo,
        n_hi,
        samples,
        r_estimate,
        r_extrapolation_table: table,
        remainder_reference,
        remainder_trend,
    })
}

/// Dyadic estimate of `r` on `[2, n_max]`.
pub fn estimate_r(b: &SequenceExpr, n_max: u64) -> Result<RatioDiagnostics, StarError> {
    if n_max < 64 {
        return Err(StarError::Domain(format!("estimate_r needs n_max >= 64, got {n_max}")));
    }
    ratio_diagnostics(b, 2, n_max, None)
}
