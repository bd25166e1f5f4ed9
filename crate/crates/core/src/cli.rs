//! The `gaplab` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::Parser;
use serde_json::json;

use crate::config::{Command, ConfigError, PartialConfig, RunConfig};
use crate::dsl::{eval_sequence, parse_sequence};
use crate::gaps::{gpy_statistics, literature_bounds};
use crate::report::{
    export_report, write_primes_csv, BoundsReport, Evaluation, Format, GapReport, ParseReport, PolignacCount, Report,
    ScanOutput, SeriesReport, SieveSummary, SweepReport,
};
use crate::series::{reciprocal_prime_sum, Checkpoints};
use crate::sieve::{nth_prime, prime_count, sieve_primes, write_primes_le, SieveOptions};
use crate::star::{corollary_scan, epsilon_sweep, star_check, summarize_scan, ScanParams};
use crate::Error;

/// Integers written plainly, with `_` separators, as `1e6` or as `10^6`.
fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let (base, exp) = if let Some((m, e)) = t.split_once(['e', 'E']) {
        (m.parse::<u64>().map_err(|e| e.to_string())?, e)
    } else if let Some((b, e)) = t.split_once('^') {
        if b != "10" {
            return Err(format!("only powers of ten are accepted, got '{s}'"));
        }
        (1, e)
    } else {
        return Err(format!("not an integer: '{s}'"));
    };
    let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in '{s}'"))?;
    10u64.checked_pow(exp).and_then(|p| p.checked_mul(base)).ok_or_else(|| format!("'{s}' overflows 64 bits"))
}

/// Prime-gap statistics, reciprocal-prime series, ratio-condition checks for
/// sequence formulas, and prime-ratio scans.
#[derive(Debug, Parser)]
#[command(name = "gaplab", version, about)]
struct Cli {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML file with default values; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Upper bound on primes (accepts 1000000, 1_000_000, 1e6, 10^6).
    #[arg(long, value_parser = parse_count)]
    limit: Option<u64>,
    /// Sequence formula in n, e.g. "1/ln(n)^2".
    #[arg(long = "expr")]
    expression: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Slack standing in for the little-o term.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Comma-separated epsilon values; one summary each.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    epsilon_grid: Option<Vec<f64>>,
    /// Comma-separated prime indices (default: powers of two plus the last index).
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    checkpoints: Option<Vec<u64>>,
    /// Even gap sizes to count (default 2,4,6).
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u64>>,
    /// Indices at which to evaluate a parsed formula.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    at: Option<Vec<u64>>,
    #[arg(long)]
    n0: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    n_max: Option<u64>,
    /// First gap index the scan considers (default 2).
    #[arg(long)]
    n_lo: Option<u64>,
    /// Report p_nth as part of 'sieve'.
    #[arg(long, value_parser = parse_count)]
    nth: Option<u64>,
    /// Integers per sieve segment.
    #[arg(long, value_parser = parse_count)]
    segment_size: Option<u64>,
    /// Output file, or '-' for stdout.
    #[arg(long = "out")]
    output: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Cli {
    fn into_partial(self) -> (Option<PathBuf>, PartialConfig) {
        let partial = PartialConfig {
            command: self.command,
            limit: self.limit,
            expression: self.expression,
            r: self.r,
            epsilon: self.epsilon,
            epsilon_grid: self.epsilon_grid,
            checkpoints: self.checkpoints,
            k: self.k,
            at: self.at,
            n0: self.n0,
            n_max: self.n_max,
            n_lo: self.n_lo,
            nth: self.nth,
            segment_size: self.segment_size,
            output: self.output,
            format: self.format,
            threads: self.threads,
        };
        (self.config, partial)
    }
}

fn sieve_options(cfg: &RunConfig) -> SieveOptions {
    let mut opts = SieveOptions::default().with_threads(cfg.threads);
    if let Some(s) = cfg.segment_size {
        opts = opts.with_segment_size(s);
    }
    opts
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::Usage(format!("missing --{flag}")))
}

fn open_output(cfg: &RunConfig) -> Result<Box<dyn Write>, Error> {
    Ok(match &cfg.output.path {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Builds the report for a validated configuration. `sieve` with CSV or binary
/// output streams straight to the destination and returns `None`.
pub fn build_report(cfg: &RunConfig) -> Result<Option<Report>, Error> {
    let opts = sieve_options(cfg);
    let report = match cfg.command {
        Command::Sieve => {
            if cfg.output.format != Format::Json {
                let limit = required(cfg.limit, "limit")?;
                let stream = sieve_primes(limit, &opts)?;
                let out = open_output(cfg)?;
                match cfg.output.format {
                    Format::Bin => {
                        write_primes_le(out, stream)?;
                    }
                    _ => {
                        write_primes_csv(out, stream)?;
                    }
                }
                return Ok(None);
            }
            let nth_prime = cfg.nth.map(|n| nth_prime(n, &opts)).transpose()?;
            let limit = cfg.limit.or(nth_prime).unwrap_or(2);
            let mut last_prime = None;
            let mut count = 0;
            if limit >= 2 {
                count = prime_count(limit, &opts)?;
                last_prime = sieve_primes(limit, &opts)?.last().and_then(|b| b.primes.last().copied());
            }
            Report::Sieve(SieveSummary { limit, prime_count: count, last_prime, nth: cfg.nth, nth_prime })
        }
        Command::Gaps => {
            let stats = gpy_statistics(required(cfg.limit, "limit")?, &opts)?;
            let mut polignac = Vec::new();
            for &k in &cfg.k {
                if k == 0 || k % 2 == 1 {
                    return Err(Error::Usage(format!("--k values must be positive and even, got {k}")));
                }
                polignac.push(PolignacCount { k, count: stats.count(k) });
            }
            Report::Gaps(GapReport { stats, polignac })
        }
        Command::Series => {
            let limit = required(cfg.limit, "limit")?;
            let cps = match &cfg.checkpoints {
                Some(points) => Checkpoints::Explicit(points.clone()),
                None => Checkpoints::Dyadic,
            };
            Report::Series(SeriesReport { limit, checkpoints: reciprocal_prime_sum(limit, &cps, &opts)? })
        }
        Command::Parse => {
            let input = cfg.expression.clone().unwrap_or_default();
            let ast = parse_sequence(&input)?;
            let values = cfg
                .at
                .iter()
                .map(|&n| match eval_sequence(&ast, n) {
                    Ok(v) => Evaluation { n, value: Some(v.to_f64()), error: None },
                    Err(e) => Evaluation { n, value: None, error: Some(e.to_string()) },
                })
                .collect();
            Report::Parse(ParseReport { input, canonical: ast.to_string(), ast, values })
        }
        Command::Star => {
            let b = parse_sequence(cfg.expression.as_deref().unwrap_or_default())?;
            Report::Star(star_check(&b, required(cfg.r, "r")?, cfg.n0, cfg.n_max)?)
        }
        Command::Scan => {
            let r = required(cfg.r, "r")?;
            let limit = required(cfg.limit, "limit")?;
            match &cfg.epsilon_grid {
                Some(grid) => {
                    Report::Sweep(SweepReport { r, limit, summaries: epsilon_sweep(r, grid, cfg.n_lo, limit, &opts)? })
                }
                None => {
                    let params = ScanParams { r, epsilon: cfg.epsilon.unwrap_or(0.0), n_lo: cfg.n_lo };
                    let scan = corollary_scan(&params, limit, &opts)?;
                    let theorem = summarize_scan(&scan);
                    Report::Scan(ScanOutput { scan, theorem })
                }
            }
        }
        Command::Bounds => Report::Bounds(BoundsReport { bounds: literature_bounds() }),
    };
    Ok(Some(report))
}

/// Runs one validated configuration and writes its output.
pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let work = || -> Result<(), Error> {
        if let Some(report) = build_report(cfg)? {
            let bytes = export_report(&report, cfg.output.format)?;
            let mut out = open_output(cfg)?;
            out.write_all(&bytes)?;
            out.flush()?;
        }
        Ok(())
    };
    if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {} threads: {e}", cfg.threads)))?;
        pool.install(work)
    } else {
        work()
    }
}

fn report_error(kind: &str, message: &str) {
    let obj = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{obj}");
}

/// Parses `args`, runs, and returns the process exit code: 0 on success, 2 for
/// usage errors (including malformed formulas), 1 for computation errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            report_error("usage", e.to_string().trim());
            return 2;
        }
    };
    let (file, flags) = cli.into_partial();
    let merged = match file.map(|p| PartialConfig::from_file(&p)).transpose() {
        Ok(base) => flags.overlay(base.unwrap_or_default()),
        Err(e) => {
            report_error("usage", &e.to_string());
            return 2;
        }
    };
    let cfg = match RunConfig::validate(merged) {
        Ok(cfg) => cfg,
        Err(e @ ConfigError::Usage(_)) | Err(e @ ConfigError::File { .. }) => {
            report_error("usage", &e.to_string());
            return 2;
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) if e.is_usage() => {
            report_error(e.kind(), &e.to_string());
            2
        }
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_in_several_spellings() {
        assert_eq!(parse_count("1000000"), Ok(1_000_000));
        assert_eq!(parse_count("1_000_000"), Ok(1_000_000));
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("25e2"), Ok(2500));
        assert_eq!(parse_count("10^9"), Ok(1_000_000_000));
        assert!(parse_count("2^10").is_err());
        assert!(parse_count("1e30").is_err());
        assert!(parse_count("abc").is_err());
    }
}
