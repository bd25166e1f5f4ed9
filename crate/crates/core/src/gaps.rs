//! Prime gaps `g_n = p_{n+1} - p_n` and their single-pass statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::sieve::{sieve_primes, PrimeStream, SieveError, SieveOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GapError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// One consecutive prime pair, `n` 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRecord {
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    pub g_n: u64,
}

/// Consecutive-pair records over an ordered prime stream.
#[derive(Debug)]
pub struct GapStream {
    blocks: PrimeStream,
    current: std::vec::IntoIter<u64>,
    prev: Option<(u64, u64)>,
}

impl Iterator for GapStream {
    type Item = GapRecord;

    fn next(&mut self) -> Option<GapRecord> {
        loop {
            if let Some(p) = self.current.next() {
                match self.prev.replace((self.prev.map_or(1, |(i, _)| i + 1), p)) {
                    Some((n, p_n)) => return Some(GapRecord { n, p_n, p_next: p, g_n: p - p_n }),
                    None => continue,
                }
            }
            self.current = self.blocks.next()?.primes.into_iter();
        }
    }
}

/// One record per pair with `p_{n+1} <= limit`, in index order.
pub fn gap_stream(limit: u64, opts: &SieveOptions) -> Result<GapStream, GapError> {
    if limit < 3 {
        return Err(GapError::Domain(format!("gap stream needs limit >= 3, got {limit}")));
    }
    Ok(GapStream { blocks: sieve_primes(limit, opts)?, current: Vec::new().into_iter(), prev: None })
}

/// Number of `n >= 2` with `g_n = k` and `p_{n+1} <= limit`.
pub fn polignac_count(k: u64, limit: u64, opts: &SieveOptions) -> Result<u64, GapError> {
    if k == 0 || k % 2 == 1 {
        return Err(GapError::Domain(format!("gap size must be a positive even integer, got {k}")));
    }
    if limit < 3 {
        return Ok(0);
    }
    Ok(gap_stream(limit, opts)?.filter(|r| r.g_n == k).count() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub gap: u64,
    pub count: u64,
}

/// Minimum of `g_n` over `n >= from_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailMin {
    pub from_n: u64,
    pub min_gap: u64,
}

/// Where a normalised-gap minimum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioMin {
    pub n: u64,
    pub p_n: u64,
    pub g_n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub limit: u64,
    pub total_gaps: u64,
    /// Sum of all gaps; equals `last_prime - 2`.
    pub gap_sum: u64,
    pub last_prime: u64,
    pub histogram: Vec<HistogramEntry>,
    /// Liminf proxies: tail minima of `g_n` from each dyadic `n >= 2`.
    pub min_gap_tail: Vec<TailMin>,
    /// min of `g_n / ln p_n` over `n >= 2`.
    pub gpy_min: Option<RatioMin>,
    /// min of `g_n / (sqrt(ln p_n) (ln ln p_n)^2)` over `n >= 2`.
    pub gpy_sqrt_min: Option<RatioMin>,
    /// mean of `g_n / ln p_n` over `n >= 2`.
    pub gpy_mean: Option<f64>,
}

impl GapStats {
    pub fn count(&self, k: u64) -> u64 {
        self.histogram.iter().find(|e| e.gap == k).map_or(0, |e| e.count)
    }
}

/// Streaming reducer; memory is one entry per distinct gap plus one per dyadic window.
#[derive(Debug, Clone, Default)]
pub struct GapAccumulator {
    limit: u64,
    total: u64,
    gap_sum: u64,
    last_prime: u64,
    histogram: BTreeMap<u64, u64>,
    // window k holds n in [2^k, 2^{k+1})
    window_min: Vec<u64>,
    gpy_min: Option<RatioMin>,
    gpy_sqrt_min: Option<RatioMin>,
    gpy_sum: Dd,
}

fn replace_min(slot: &mut Option<RatioMin>, candidate: RatioMin) {
    // strict comparison keeps the first index on ties
    if slot.is_none_or(|m| candidate.value < m.value) {
        *slot = Some(candidate);
    }
}

impl GapAccumulator {
    pub fn new(limit: u64) -> Self {
        Self { limit, ..Default::default() }
    }

    pub fn push(&mut self, r: &GapRecord) {
        self.total += 1;
        self.gap_sum += r.g_n;
        self.last_prime = r.p_next;
        *self.histogram.entry(r.g_n).or_default() += 1;
        if r.n < 2 {
            return;
        }
        let w = (63 - r.n.leading_zeros()) as usize;
        if self.window_min.len() <= w {
            self.window_min.resize(w + 1, u64::MAX);
        }
        self.window_min[w] = self.window_min[w].min(r.g_n);

        let ln_p = (r.p_n as f64).ln();
        let g = r.g_n as f64;
        let ratio = g / ln_p;
        replace_min(&mut self.gpy_min, RatioMin { n: r.n, p_n: r.p_n, g_n: r.g_n, value: ratio });
        self.gpy_sum += Dd::from(ratio);
        let denom = ln_p.sqrt() * ln_p.ln().powi(2);
        if denom > 0.0 {
            replace_min(&mut self.gpy_sqrt_min, RatioMin { n: r.n, p_n: r.p_n, g_n: r.g_n, value: g / denom });
        }
    }

    pub fn finish(self) -> GapStats {
        let mut min_gap_tail = Vec::new();
        let mut running = u64::MAX;
        for (k, &m) in self.window_min.iter().enumerate().rev() {
            if k == 0 {
                continue;
            }
            running = running.min(m);
            if running != u64::MAX {
                min_gap_tail.push(TailMin { from_n: 1 << k, min_gap: running });
            }
        }
        min_gap_tail.reverse();
        let even = self.total.saturating_sub(1);
        GapStats {
            limit: self.limit,
            total_gaps: self.total,
            gap_sum: self.gap_sum,
            last_prime: self.last_prime,
            histogram: self.histogram.into_iter().map(|(gap, count)| HistogramEntry { gap, count }).collect(),
            min_gap_tail,
            gpy_min: self.gpy_min,
            gpy_sqrt_min: self.gpy_sqrt_min,
            gpy_mean: (even > 0).then(|| (self.gpy_sum / Dd::from_u64(even)).to_f64()),
        }
    }
}

/// Histogram, tail minima and normalised-gap minima over all pairs `<= limit`.
pub fn gpy_statistics(limit: u64, opts: &SieveOptions) -> Result<GapStats, GapError> {
    if limit < 5 {
        return Err(GapError::Domain(format!("gap statistics need limit >= 5, got {limit}")));
    }
    let mut acc = GapAccumulator::new(limit);
    for r in gap_stream(limit, opts)? {
        acc.push(&r);
    }
    Ok(acc.finish())
}

/// A published bound on `liminf (p_{n+1} - p_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteratureBound {
    pub name: String,
    pub value: u64,
    pub conditional: bool,
    pub citation: String,
}

const BOUNDS: [(&str, u64, bool, &str); 4] = [
    (
        "gpy_conditional",
        16,
        true,
        "Goldston, Pintz, Yildirim (2009): liminf (p_{n+1} - p_n) <= 16 assuming a level of distribution above 1/2",
    ),
    ("zhang", 70_000_000, false, "Y. Zhang (2014), Bounded gaps between primes: liminf (p_{n+1} - p_n) <= 7*10^7"),
    ("polymath8", 4680, false, "D.H.J. Polymath (2014): Zhang's bound reduced to 4680"),
    ("maynard", 600, false, "J. Maynard (2015), Small gaps between primes: bound 600 via Bombieri-Vinogradov"),
];

pub fn literature_bounds() -> Vec<LiteratureBound> {
    BOUNDS
        .iter()
        .map(|&(name, value, conditional, citation)| LiteratureBound {
            name: name.into(),
            value,
            conditional,
            citation: citation.into(),
        })
        .collect()
}

pub fn lookup_bound(name: &str) -> Option<LiteratureBound> {
    literature_bounds().into_iter().find(|b| b.name == name)
}
