//! Partial sums of `1/p_n` and the ratio `p_n / (n ln n)` at checkpoints.
//!
//! Sums are accumulated in double-double, in ascending prime order.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::sieve::{sieve_primes, SieveError, SieveOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: checkpoint n={n} exceeds the {available} primes <= {limit}")]
    Range { n: u64, available: u64, limit: u64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// Which indices to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Checkpoints {
    /// Powers of two plus the last index.
    Dyadic,
    /// Strictly increasing explicit indices.
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheckpoint {
    pub n: u64,
    pub p_n: u64,
    /// `sum_{i <= n} 1/p_i`, rounded from the double-double accumulator.
    pub partial_sum: f64,
    /// `p_n / (n ln n)`; absent at n = 1.
    pub pnt_ratio: Option<f64>,
    /// `partial_sum - ln ln p_n`; absent at p_n = 2.
    pub loglog_gap: Option<f64>,
}

/// Running state of the two trackers.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeriesTracker {
    n: u64,
    p: u64,
    sum: Dd,
}

impl SeriesTracker {
    pub fn push(&mut self, p: u64) {
        self.n += 1;
        self.p = p;
        self.sum += Dd::ONE / Dd::from_u64(p);
    }

    pub fn sum(&self) -> Dd {
        self.sum
    }

    pub fn checkpoint(&self) -> SeriesCheckpoint {
        let pnt_ratio = (self.n >= 2).then(|| {
            let n = Dd::from_u64(self.n);
            (Dd::from_u64(self.p) / (n * n.ln())).to_f64()
        });
        let loglog_gap = (self.p >= 3).then(|| (self.sum - Dd::from_u64(self.p).ln().ln()).to_f64());
        SeriesCheckpoint { n: self.n, p_n: self.p, partial_sum: self.sum.to_f64(), pnt_ratio, loglog_gap }
    }
}

fn explicit_checks(points: &[u64]) -> Result<(), SeriesError> {
    if points.is_empty() {
        return Err(SeriesError::Domain("checkpoint list is empty".into()));
    }
    if points[0] == 0 {
        return Err(SeriesError::Domain("checkpoint indices start at 1".into()));
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SeriesError::Domain("checkpoints must be strictly increasing".into()));
    }
    Ok(())
}

/// Walks the primes `<= limit` once and snapshots the tracker at each checkpoint.
fn track(
    limit: u64,
    checkpoints: &Checkpoints,
    from: u64,
    opts: &SieveOptions,
) -> Result<Vec<SeriesCheckpoint>, SeriesError> {
    if limit < 2 {
        return Err(SeriesError::Domain(format!("series limit must be at least 2, got {limit}")));
    }
    let explicit = match checkpoints {
        Checkpoints::Explicit(points) => {
            explicit_checks(points)?;
            Some(points.as_slice())
        }
        Checkpoints::Dyadic => None,
    };
    let mut tracker = SeriesTracker::default();
    let mut out = Vec::new();
    let mut next = 0usize;
    for block in sieve_primes(limit, opts)? {
        for &p in &block.primes {
            tracker.push(p);
            let n = tracker.n;
            let hit = match explicit {
                Some(points) => points.get(next) == Some(&n),
                None => n >= from && n.is_power_of_two(),
            };
            if hit {
                out.push(tracker.checkpoint());
                next += 1;
            }
        }
    }
    match explicit {
        Some(points) => {
            if let Some(&n) = points.get(next) {
                return Err(SeriesError::Range { n, available: tracker.n, limit });
            }
        }
        None => {
            if out.last().map(|c| c.n) != Some(tracker.n) && tracker.n >= from {
                out.push(tracker.checkpoint());
            }
        }
    }
    Ok(out)
}

/// Partial sums of `sum 1/p_n` over primes `<= limit`.
pub fn reciprocal_prime_sum(
    limit: u64,
    checkpoints: &Checkpoints,
    opts: &SieveOptions,
) -> Result<Vec<SeriesCheckpoint>, SeriesError> {
    track(limit, checkpoints, 1, opts)
}

/// `p_n / (n ln n)` at each checkpoint; every checkpoint must be at least 2.
pub fn pnt_ratio_track(
    limit: u64,
    checkpoints: &Checkpoints,
    opts: &SieveOptions,
) -> Result<Vec<SeriesCheckpoint>, SeriesError> {
    if let Checkpoints::Explicit(points) = checkpoints {
        if points.first() == Some(&1) {
            return Err(SeriesError::Domain("checkpoint n=1 is singular: n ln n = 0".into()));
        }
    }
    track(limit, checkpoints, 2, opts)
}

/// The full double-double sum of `1/p` over primes `<= limit`.
pub fn reciprocal_sum_dd(limit: u64, opts: &SieveOptions) -> Result<Dd, SeriesError> {
    let mut tracker = SeriesTracker::default();
    for block in sieve_primes(limit, opts)? {
        block.primes.iter().for_each(|&p| tracker.push(p));
    }
    Ok(tracker.sum())
}
