//! Prime-gap statistics, reciprocal-prime series, and ratio-condition analysis of
//! positive sequences.
//!
//! The pieces, bottom up:
//!
//! * [`sieve`]: segmented odd-only sieve streaming ordered prime blocks.
//! * [`gaps`]: gap records, histograms, twin/Polignac counts and `g_n / ln p_n` minima.
//! * [`series`]: partial sums of `1/p` and `p_n / (n ln n)` at checkpoints.
//! * [`dsl`]: parser and evaluator for sequence formulas in `n`.
//! * [`star`]: ratio-excess estimates, summability evidence and the prime-ratio scan.
//! * [`report`], [`config`], [`cli`]: export schemas and the `gaplab` binary.

pub mod cli;
pub mod config;
pub mod dd;
pub mod dsl;
pub mod gaps;
pub mod report;
pub mod series;
pub mod sieve;
pub mod star;

pub use dd::Dd;

/// Any failure surfaced by the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("{0}")]
    Parse(#[from] dsl::ParseError),
    #[error(transparent)]
    Eval(#[from] dsl::EvalError),
    #[error(transparent)]
    Sieve(#[from] sieve::SieveError),
    #[error(transparent)]
    Gaps(#[from] gaps::GapError),
    #[error(transparent)]
    Series(#[from] series::SeriesError),
    #[error(transparent)]
    Star(#[from] star::StarError),
    #[error(transparent)]
    Export(#[from] report::ExportError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Config(_) | Error::Parse(_))
    }

    /// Originating module, for the machine-readable error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Usage(_) | Error::Config(_) => "usage",
            Error::Parse(_) => "parse",
            Error::Eval(_) => "eval",
            Error::Sieve(_) => "sieve",
            Error::Gaps(_) => "gaps",
            Error::Series(_) => "series",
            Error::Star(_) => "star",
            Error::Export(_) => "export",
            Error::Io(_) => "io",
        }
    }
}
