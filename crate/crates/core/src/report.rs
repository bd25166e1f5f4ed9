//! CSV and JSON export.
//!
//! JSON reports are objects with sorted keys, carrying `schema` and
//! `schema_version` next to the report fields. Floating-point values are rounded
//! to 15 significant digits in both formats. CSV uses `\n` line endings, `.` as the
//! decimal separator and no digit grouping.

use std::io::{self, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dsl::SequenceExpr;
use crate::gaps::{GapStats, LiteratureBound};
use crate::series::SeriesCheckpoint;
use crate::sieve::PrimeStream;
use crate::star::{ScanReport, StarReport, TheoremSummary};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("internal error: no {format} schema registered for {schema}")]
    UnknownSchema { schema: &'static str, format: &'static str },
    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// Raw little-endian `u64` primes (sieve only).
    Bin,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Bin => "bin",
        }
    }
}

/// `x` with 15 significant digits, in the style of C's `%.15g`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.14e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        let mant = trim_zeros(mant);
        return format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (14 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to the value its 15-digit rendering denotes.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.14e}", x).parse().expect("round trip")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round15(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialises `report` as a versioned JSON object with sorted keys.
pub fn to_json<T: Serialize>(schema: &str, report: &T) -> Result<Vec<u8>, ExportError> {
    let mut value = serde_json::to_value(report)?;
    round_value(&mut value);
    let obj = match value {
        Value::Object(map) => map,
        other => {
            let mut map = serde_json::Map::new();
            map.insert("data".into(), other);
            map
        }
    };
    let mut obj = obj;
    obj.insert("schema".into(), Value::String(schema.into()));
    obj.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    let mut out = serde_json::to_vec_pretty(&Value::Object(obj))?;
    out.push(b'\n');
    Ok(out)
}

/// Reads a report written by [`to_json`], checking schema name and version.
pub fn from_json<T: DeserializeOwned>(schema: &str, bytes: &[u8]) -> Result<T, ExportError> {
    let mut value: Value = serde_json::from_slice(bytes)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| ExportError::SchemaMismatch { expected: schema.into(), found: "non-object".into() })?;
    let found = obj.remove("schema").and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let version = obj.remove("schema_version").and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    if found != schema || version != SCHEMA_VERSION {
        return Err(ExportError::SchemaMismatch {
            expected: format!("{schema} v{SCHEMA_VERSION}"),
            found: format!("{found} v{version}"),
        });
    }
    let value = match obj.remove("data") {
        Some(data) if obj.is_empty() => data,
        Some(data) => {
            obj.insert("data".into(), data);
            value
        }
        None => value,
    };
    Ok(serde_json::from_value(value)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveSummary {
    pub limit: u64,
    pub prime_count: u64,
    pub last_prime: Option<u64>,
    pub nth: Option<u64>,
    pub nth_prime: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolignacCount {
    pub k: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub stats: GapStats,
    pub polignac: Vec<PolignacCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub limit: u64,
    pub checkpoints: Vec<SeriesCheckpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub n: u64,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseReport {
    pub input: String,
    pub canonical: String,
    pub ast: SequenceExpr,
    pub values: Vec<Evaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    #[serde(flatten)]
    pub scan: ScanReport,
    pub theorem: TheoremSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub r: f64,
    pub limit: u64,
    pub summaries: Vec<TheoremSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub bounds: Vec<LiteratureBound>,
}

/// Every report the command line can emit.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Sieve(SieveSummary),
    Gaps(GapReport),
    Series(SeriesReport),
    Parse(ParseReport),
    Star(StarReport),
    Scan(ScanOutput),
    Sweep(SweepReport),
    Bounds(BoundsReport),
}

impl Report {
    pub fn schema(&self) -> &'static str {
        match self {
            Report::Sieve(_) => "gaplab.sieve",
            Report::Gaps(_) => "gaplab.gaps",
            Report::Series(_) => "gaplab.series",
            Report::Parse(_) => "gaplab.parse",
            Report::Star(_) => "gaplab.star",
            Report::Scan(_) => "gaplab.scan",
            Report::Sweep(_) => "gaplab.sweep",
            Report::Bounds(_) => "gaplab.bounds",
        }
    }

    /// Reads back any JSON report, dispatching on its `schema` field.
    pub fn from_json(bytes: &[u8]) -> Result<Report, ExportError> {
        #[derive(Deserialize)]
        struct Tag {
            schema: String,
        }
        let tag: Tag = serde_json::from_slice(bytes)?;
        let s = tag.schema.as_str();
        Ok(match s {
            "gaplab.sieve" => Report::Sieve(from_json(s, bytes)?),
            "gaplab.gaps" => Report::Gaps(from_json(s, bytes)?),
            "gaplab.series" => Report::Series(from_json(s, bytes)?),
            "gaplab.parse" => Report::Parse(from_json(s, bytes)?),
            "gaplab.star" => Report::Star(from_json(s, bytes)?),
            "gaplab.scan" => Report::Scan(from_json(s, bytes)?),
            "gaplab.sweep" => Report::Sweep(from_json(s, bytes)?),
            "gaplab.bounds" => Report::Bounds(from_json(s, bytes)?),
            _ => return Err(ExportError::SchemaMismatch { expected: "a gaplab report".into(), found: tag.schema }),
        })
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn opt_int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, ExportError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| ExportError::Io(e.into_error()))
}

pub const HISTOGRAM_HEADER: [&str; 2] = ["gap", "count"];
pub const SERIES_HEADER: [&str; 5] = ["n", "p_n", "partial_sum", "pnt_ratio", "loglog_gap"];
pub const HITS_HEADER: [&str; 6] = ["n", "p_n", "p_next", "g_n", "threshold", "borderline"];
pub const RATIO_TABLE_HEADER: [&str; 5] = ["n", "e_n", "diff", "decay", "richardson"];
pub const SWEEP_HEADER: [&str; 6] =
    ["epsilon", "hit_count", "borderline_count", "min_gap_among_hits", "tail_min_gap", "implied_bound"];
pub const BOUNDS_HEADER: [&str; 4] = ["name", "value", "conditional", "citation"];
pub const EVAL_HEADER: [&str; 3] = ["n", "value", "error"];

fn to_csv(report: &Report) -> Result<Vec<u8>, ExportError> {
    match report {
        Report::Gaps(g) => {
            csv_table(&HISTOGRAM_HEADER, g.stats.histogram.iter().map(|e| vec![e.gap.to_string(), e.count.to_string()]))
        }
        Report::Series(s) => csv_table(
            &SERIES_HEADER,
            s.checkpoints.iter().map(|c| {
                vec![
                    c.n.to_string(),
                    c.p_n.to_string(),
                    fmt_num(c.partial_sum),
                    opt_num(c.pnt_ratio),
                    opt_num(c.loglog_gap),
                ]
            }),
        ),
        Report::Parse(p) => csv_table(
            &EVAL_HEADER,
            p.values.iter().map(|v| vec![v.n.to_string(), opt_num(v.value), v.error.clone().unwrap_or_default()]),
        ),
        Report::Star(s) => csv_table(
            &RATIO_TABLE_HEADER,
            s.ratio.r_extrapolation_table.iter().map(|row| {
                vec![
                    row.n.to_string(),
                    fmt_num(row.e_n),
                    opt_num(row.diff),
                    opt_num(row.decay),
                    opt_num(row.richardson),
                ]
            }),
        ),
        Report::Scan(s) => csv_table(
            &HITS_HEADER,
            s.scan.rows().into_iter().map(|h| {
                vec![
                    h.n.to_string(),
                    h.p_n.to_string(),
                    h.p_next.to_string(),
                    h.g_n.to_string(),
                    fmt_num(h.threshold),
                    h.borderline.to_string(),
                ]
            }),
        ),
        Report::Sweep(s) => csv_table(
            &SWEEP_HEADER,
            s.summaries.iter().map(|t| {
                vec![
                    fmt_num(t.epsilon),
                    t.hit_count.to_string(),
                    t.borderline_count.to_string(),
                    opt_int(t.min_gap_among_hits),
                    opt_int(t.tail_min_gap),
                    opt_int(t.implied_bound),
                ]
            }),
        ),
        Report::Bounds(b) => csv_table(
            &BOUNDS_HEADER,
            b.bounds
                .iter()
                .map(|b| vec![b.name.clone(), b.value.to_string(), b.conditional.to_string(), b.citation.clone()]),
        ),
        Report::Sieve(_) => Err(ExportError::UnknownSchema { schema: report.schema(), format: "csv" }),
    }
}

/// Renders `report` in `format`.
pub fn export_report(report: &Report, format: Format) -> Result<Vec<u8>, ExportError> {
    let schema = report.schema();
    match format {
        Format::Csv => to_csv(report),
        Format::Json => match report {
            Report::Sieve(r) => to_json(schema, r),
            Report::Gaps(r) => to_json(schema, r),
            Report::Series(r) => to_json(schema, r),
            Report::Parse(r) => to_json(schema, r),
            Report::Star(r) => to_json(schema, r),
            Report::Scan(r) => to_json(schema, r),
            Report::Sweep(r) => to_json(schema, r),
            Report::Bounds(r) => to_json(schema, r),
        },
        Format::Bin => Err(ExportError::UnknownSchema { schema, format: format.name() }),
    }
}

/// Streams `n,p_n` rows for every prime in `stream`.
pub fn write_primes_csv<W: Write>(out: W, stream: PrimeStream) -> Result<u64, ExportError> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "n,p_n")?;
    let mut count = 0;
    for block in stream {
        for (i, p) in block.indexed() {
            writeln!(out, "{i},{p}")?;
            count += 1;
        }
    }
    out.flush()?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::{gpy_statistics, literature_bounds};
    use crate::sieve::SieveOptions;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e6), "666666.666666667");
        assert_eq!(fmt_num(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt_num(1.23456789e20), "1.23456789e+20");
        assert_eq!(fmt_num(9.999_999_999_999_999), "10");
        assert_eq!(fmt_num(123456789012345.0), "123456789012345");
        assert_eq!(fmt_num(1234567890123456.0), "1.23456789012346e+15");
    }

    #[test]
    fn histogram_csv_header() {
        let stats = gpy_statistics(100, &SieveOptions::default()).unwrap();
        let out = export_report(&Report::Gaps(GapReport { stats, polignac: vec![] }), Format::Csv).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("gap,count\n1,1\n2,8\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_keys_sorted_and_versioned() {
        let out = export_report(&Report::Bounds(BoundsReport { bounds: literature_bounds() }), Format::Json).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("\"schema\": \"gaplab.bounds\""));
        assert!(text.contains("\"schema_version\": \"1.0\""));
        assert!(text.contains("70000000"));
        let b = text.find("\"bounds\"").unwrap();
        let s = text.find("\"schema\"").unwrap();
        assert!(b < s);
    }

    #[test]
    fn unregistered_combinations_are_internal_errors() {
        let r =
            Report::Sieve(SieveSummary { limit: 10, prime_count: 4, last_prime: Some(7), nth: None, nth_prime: None });
        assert!(matches!(export_report(&r, Format::Csv), Err(ExportError::UnknownSchema { .. })));
        assert!(matches!(export_report(&r, Format::Bin), Err(ExportError::UnknownSchema { .. })));
    }

    #[test]
    fn schema_mismatch_detected() {
        let bytes = to_json("gaplab.bounds", &BoundsReport { bounds: vec![] }).unwrap();
        assert!(matches!(from_json::<BoundsReport>("gaplab.gaps", &bytes), Err(ExportError::SchemaMismatch { .. })));
        let back: BoundsReport = from_json("gaplab.bounds", &bytes).unwrap();
        assert!(back.bounds.is_empty());
    }
}
