//! Segmented sieve of Eratosthenes.
//!
//! Each segment stores one bit per odd integer in a `u64` bitmap. Segments are
//! independent once the base primes up to `sqrt(limit)` are known, so batches of
//! segments can be sieved on a rayon pool; blocks are always handed to the consumer
//! in index order, so the stream is identical for every thread count and segment
//! size.

use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Integers spanned by one segment by default (a 32 KiB odd-only bitmap).
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 19;
/// Smallest accepted segment span.
pub const MIN_SEGMENT_SIZE: u64 = 64;
/// Largest supported sieve limit.
pub const MAX_LIMIT: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SieveError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {what} exceeds the maximum supported limit {max}")]
    Capacity { what: String, max: u64 },
}

/// Tuning knobs that never change the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveOptions {
    /// Integers per segment; rounded up to a multiple of 128.
    pub segment_size: u64,
    /// Worker threads; `1` sieves on the calling thread.
    pub threads: usize,
}

impl Default for SieveOptions {
    fn default() -> Self {
        Self { segment_size: DEFAULT_SEGMENT_SIZE, threads: 1 }
    }
}

impl SieveOptions {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_segment_size(mut self, segment_size: u64) -> Self {
        self.segment_size = segment_size;
        self
    }

    fn validate(&self) -> Result<(), SieveError> {
        if self.segment_size < MIN_SEGMENT_SIZE {
            return Err(SieveError::Domain(format!(
                "segment size {} is below the minimum {MIN_SEGMENT_SIZE}",
                self.segment_size
            )));
        }
        if self.threads == 0 {
            return Err(SieveError::Domain("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

/// A contiguous run of primes from one sieve segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeBlock {
    /// 1-based index of `primes[0]` (p_1 = 2).
    pub start_index: u64,
    pub primes: Vec<u64>,
    /// Largest integer covered by the segment.
    pub limit_hint: u64,
}

impl PrimeBlock {
    /// Index of the last prime in the block.
    pub fn end_index(&self) -> u64 {
        self.start_index + self.primes.len() as u64 - 1
    }

    /// `(index, prime)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.primes.iter().enumerate().map(move |(i, &p)| (self.start_index + i as u64, p))
    }
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Odd primes up to `n` with a plain (unsegmented) odd-only sieve.
fn odd_base_primes(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    // index i <-> 2i + 1
    let half = (n as usize - 1) / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    composite.iter().enumerate().filter(|&(_, &c)| !c).map(|(i, _)| 2 * i as u64 + 1).collect()
}

/// Shared sieve plan: segment geometry and base primes.
#[derive(Debug)]
struct Plan {
    limit: u64,
    span: u64,
    segments: u64,
    base: Vec<u64>,
}

impl Plan {
    fn new(limit: u64, opts: &SieveOptions) -> Result<Plan, SieveError> {
        opts.validate()?;
        if limit > MAX_LIMIT {
            return Err(SieveError::Capacity { what: format!("limit {limit}"), max: MAX_LIMIT });
        }
        let span = opts.segment_size.div_ceil(128) * 128;
        let segments = (limit + 1).div_ceil(span);
        Ok(Plan { limit, span, segments, base: odd_base_primes(isqrt(limit)) })
    }

    /// Composite bitmap for segment `k`; bit j stands for `lo + 2j + 1`.
    /// Bits past the limit are set.
    fn sieve_segment(&self, k: u64) -> (u64, u64, Vec<u64>) {
        let lo = k * self.span;
        let hi = (lo + self.span).min(self.limit + 1); // exclusive
        let nbits = ((hi - lo) / 2) as usize;
        let words = nbits.div_ceil(64);
        let mut bits = vec![0u64; words];
        if !nbits.is_multiple_of(64) {
            bits[words - 1] = !0u64 << (nbits % 64);
        }
        if lo == 0 {
            bits[0] |= 1; // 1 is not prime
        }
        for &p in &self.base {
            let sq = p * p;
            if sq >= hi {
                break;
            }
            // first odd multiple of p that is >= max(p^2, lo + 1)
            let mut start = if sq > lo { sq } else { (lo + 1).div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut j = ((start - lo - 1) / 2) as usize;
            let step = p as usize;
            while j < nbits {
                bits[j >> 6] |= 1u64 << (j & 63);
                j += step;
            }
        }
        (lo, hi, bits)
    }

    fn segment_primes(&self, k: u64) -> (Vec<u64>, u64) {
        let (lo, hi, bits) = self.sieve_segment(k);
        let mut out = Vec::new();
        if lo == 0 && self.limit >= 2 {
            out.push(2);
        }
        for (w, &word) in bits.iter().enumerate() {
            let mut free = !word;
            while free != 0 {
                let tz = free.trailing_zeros() as u64;
                out.push(lo + 2 * ((w as u64) * 64 + tz) + 1);
                free &= free - 1;
            }
        }
        (out, hi - 1)
    }

    fn segment_count(&self, k: u64) -> u64 {
        let (lo, _, bits) = self.sieve_segment(k);
        let odd: u64 = bits.iter().map(|w| w.count_zeros() as u64).sum();
        odd + u64::from(lo == 0 && self.limit >= 2)
    }
}

fn build_pool(threads: usize) -> Option<Arc<rayon::ThreadPool>> {
    if threads <= 1 {
        return None;
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok().map(Arc::new)
}

/// Ordered stream of [`PrimeBlock`]s covering every prime `<= limit`.
#[derive(Debug)]
pub struct PrimeStream {
    plan: Arc<Plan>,
    pool: Option<Arc<rayon::ThreadPool>>,
    batch: u64,
    next_segment: u64,
    next_index: u64,
    pending: std::collections::VecDeque<(Vec<u64>, u64)>,
}

impl PrimeStream {
    pub fn limit(&self) -> u64 {
        self.plan.limit
    }

    fn refill(&mut self) {
        let from = self.next_segment;
        let to = (from + self.batch).min(self.plan.segments);
        self.next_segment = to;
        let plan = &self.plan;
        let results: Vec<(Vec<u64>, u64)> = match &self.pool {
            Some(pool) => pool.install(|| (from..to).into_par_iter().map(|k| plan.segment_primes(k)).collect()),
            None => (from..to).map(|k| plan.segment_primes(k)).collect(),
        };
        self.pending.extend(results);
    }
}

impl Iterator for PrimeStream {
    type Item = PrimeBlock;

    fn next(&mut self) -> Option<PrimeBlock> {
        loop {
            if self.pending.is_empty() {
                if self.next_segment >= self.plan.segments {
                    return None;
                }
                self.refill();
            }
            let (primes, limit_hint) = self.pending.pop_front()?;
            if primes.is_empty() {
                continue;
            }
            let start_index = self.next_index;
            self.next_index += primes.len() as u64;
            return Some(PrimeBlock { start_index, primes, limit_hint });
        }
    }
}

fn check_limit(limit: u64) -> Result<(), SieveError> {
    if limit < 2 {
        return Err(SieveError::Domain(format!("sieve limit must be at least 2, got {limit}")));
    }
    Ok(())
}

/// Streams every prime `<= limit` in increasing order.
pub fn sieve_primes(limit: u64, opts: &SieveOptions) -> Result<PrimeStream, SieveError> {
    check_limit(limit)?;
    let plan = Arc::new(Plan::new(limit, opts)?);
    let pool = build_pool(opts.threads);
    let batch = if pool.is_some() { 2 * opts.threads as u64 } else { 1 };
    Ok(PrimeStream { plan, pool, batch, next_segment: 0, next_index: 1, pending: Default::default() })
}

/// All primes `<= limit` collected into one vector.
pub fn primes_up_to(limit: u64, opts: &SieveOptions) -> Result<Vec<u64>, SieveError> {
    let mut out = Vec::new();
    for block in sieve_primes(limit, opts)? {
        out.extend_from_slice(&block.primes);
    }
    Ok(out)
}

/// pi(limit), counted by popcount without materialising the primes.
pub fn prime_count(limit: u64, opts: &SieveOptions) -> Result<u64, SieveError> {
    if limit < 2 {
        return Ok(0);
    }
    let plan = Plan::new(limit, opts)?;
    let count = match build_pool(opts.threads) {
        Some(pool) => pool.install(|| (0..plan.segments).into_par_iter().map(|k| plan.segment_count(k)).sum()),
        None => (0..plan.segments).map(|k| plan.segment_count(k)).sum(),
    };
    Ok(count)
}

/// Upper bound for p_n (Rosser–Schoenfeld: p_n < n(ln n + ln ln n) for n >= 6).
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    ((x * (x.ln() + x.ln().ln())).ceil() as u64).saturating_add(1)
}

/// p_n with p_1 = 2.
pub fn nth_prime(n: u64, opts: &SieveOptions) -> Result<u64, SieveError> {
    if n == 0 {
        return Err(SieveError::Domain("prime indices start at 1".into()));
    }
    let bound = nth_prime_upper_bound(n);
    if bound > MAX_LIMIT {
        return Err(SieveError::Capacity { what: format!("p_{n} (bound {bound})"), max: MAX_LIMIT });
    }
    for block in sieve_primes(bound, opts)? {
        if block.end_index() >= n {
            return Ok(block.primes[(n - block.start_index) as usize]);
        }
    }
    unreachable!("p_{n} lies below its upper bound {bound}")
}

/// Writes primes as consecutive little-endian `u64` values.
pub fn write_primes_le<W: Write>(mut out: W, stream: PrimeStream) -> io::Result<u64> {
    let mut written = 0;
    for block in stream {
        let mut buf = Vec::with_capacity(block.primes.len() * 8);
        for p in &block.primes {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        out.write_all(&buf)?;
        written += block.primes.len() as u64;
    }
    out.flush()?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn first_primes() {
        let got = primes_up_to(10, &SieveOptions::default()).unwrap();
        assert_eq!(got, vec![2, 3, 5, 7]);
        let blocks: Vec<_> = sieve_primes(10, &SieveOptions::default()).unwrap().collect();
        assert_eq!(blocks[0].start_index, 1);
        assert_eq!(blocks[0].end_index(), 4);
    }

    #[test]
    fn hundred() {
        let got = primes_up_to(100, &SieveOptions::default()).unwrap();
        let oracle: Vec<u64> = (0..=100).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(got.len(), 25);
        assert_eq!(got, oracle);
    }

    #[test]
    fn tiny_limits() {
        assert_eq!(primes_up_to(2, &SieveOptions::default()).unwrap(), vec![2]);
        assert_eq!(primes_up_to(3, &SieveOptions::default()).unwrap(), vec![2, 3]);
        assert_eq!(prime_count(0, &SieveOptions::default()).unwrap(), 0);
        assert_eq!(prime_count(1, &SieveOptions::default()).unwrap(), 0);
        assert_eq!(prime_count(2, &SieveOptions::default()).unwrap(), 1);
    }

    #[test]
    fn limit_below_two_is_domain_error() {
        assert!(matches!(sieve_primes(1, &SieveOptions::default()), Err(SieveError::Domain(_))));
    }

    #[test]
    fn small_segment_rejected() {
        let opts = SieveOptions::default().with_segment_size(63);
        assert!(matches!(sieve_primes(100, &opts), Err(SieveError::Domain(_))));
    }

    #[test]
    fn capacity_error_names_maximum() {
        match sieve_primes(MAX_LIMIT + 1, &SieveOptions::default()) {
            Err(SieveError::Capacity { max, .. }) => assert_eq!(max, MAX_LIMIT),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(nth_prime(u64::MAX / 4, &SieveOptions::default()), Err(SieveError::Capacity { .. })));
    }

    #[test]
    fn limit_on_segment_boundaries() {
        let opts = SieveOptions::default().with_segment_size(128);
        for limit in [127, 128, 129, 255, 256, 257, 383] {
            let got = primes_up_to(limit, &opts).unwrap();
            let oracle: Vec<u64> = (0..=limit).filter(|&n| is_prime_trial(n)).collect();
            assert_eq!(got, oracle, "limit {limit}");
        }
    }

    #[test]
    fn nth_prime_small() {
        let opts = SieveOptions::default();
        assert_eq!(nth_prime(1, &opts).unwrap(), 2);
        assert_eq!(nth_prime(10, &opts).unwrap(), 29);
        assert!(nth_prime(0, &opts).is_err());
    }

    #[test]
    fn binary_dump_is_little_endian() {
        let mut buf = Vec::new();
        let n = write_primes_le(&mut buf, sieve_primes(10, &SieveOptions::default()).unwrap()).unwrap();
        assert_eq!(n, 4);
        assert_eq!(buf.len(), 32);
        assert_eq!(&buf[8..16], &3u64.to_le_bytes());
    }
}
