//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::report::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sieve,
    Gaps,
    Series,
    Parse,
    Star,
    Scan,
    Bounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sieve => "sieve",
            Command::Gaps => "gaps",
            Command::Series => "series",
            Command::Parse => "parse",
            Command::Star => "star",
            Command::Scan => "scan",
            Command::Bounds => "bounds",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Parse | Command::Star => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("config file {path}: {message}")]
    File { path: PathBuf, message: String },
}

/// Every settable field, all optional; used for both the file and the flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub limit: Option<u64>,
    pub expression: Option<String>,
    pub r: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_grid: Option<Vec<f64>>,
    pub checkpoints: Option<Vec<u64>>,
    pub k: Option<Vec<u64>>,
    pub at: Option<Vec<u64>>,
    pub n0: Option<u64>,
    pub n_max: Option<u64>,
    pub n_lo: Option<u64>,
    pub nth: Option<u64>,
    pub segment_size: Option<u64>,
    pub output: Option<String>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<PartialConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::File { path: path.into(), message: e.to_string() })?;
        toml::from_str(&text).map_err(|e| ConfigError::File { path: path.into(), message: e.to_string() })
    }

    /// `self` wins over `base` field by field.
    pub fn overlay(self, base: PartialConfig) -> PartialConfig {
        macro_rules! pick {
            ($($f:ident),*) => { PartialConfig { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            command,
            limit,
            expression,
            r,
            epsilon,
            epsilon_grid,
            checkpoints,
            k,
            at,
            n0,
            n_max,
            n_lo,
            nth,
            segment_size,
            output,
            format,
            threads
        )
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! check {
            ($($f:ident => $flag:literal),*) => { $(if self.$f.is_some() { out.push($flag); })* };
        }
        check!(
            limit => "limit", expression => "expr", r => "r", epsilon => "epsilon",
            epsilon_grid => "epsilon-grid", checkpoints => "checkpoints", k => "k", at => "at", n0 => "n0",
            n_max => "n-max", n_lo => "n-lo", nth => "nth", segment_size => "segment-size"
        );
        out
    }
}

/// Where the report goes; `path == None` means stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub limit: Option<u64>,
    pub expression: Option<String>,
    pub r: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_grid: Option<Vec<f64>>,
    pub checkpoints: Option<Vec<u64>>,
    pub k: Vec<u64>,
    pub at: Vec<u64>,
    pub n0: u64,
    pub n_max: u64,
    pub n_lo: u64,
    pub nth: Option<u64>,
    pub segment_size: Option<u64>,
    pub output: Output,
    pub threads: usize,
}

pub const DEFAULT_STAR_N_MAX: u64 = 1 << 20;
pub const DEFAULT_POLIGNAC_K: [u64; 3] = [2, 4, 6];
pub const DEFAULT_EVAL_POINTS: [u64; 4] = [2, 10, 1000, 1_000_000];

fn usage(msg: impl Into<String>) -> ConfigError {
    ConfigError::Usage(msg.into())
}

impl RunConfig {
    /// Checks required and permitted fields for the command.
    pub fn validate(p: PartialConfig) -> Result<RunConfig, ConfigError> {
        let command = p.command.ok_or_else(|| usage("no command given"))?;
        let (required, allowed): (&[&str], &[&str]) = match command {
            Command::Sieve => (&[], &["limit", "nth", "segment-size"]),
            Command::Gaps => (&["limit"], &["limit", "k", "segment-size"]),
            Command::Series => (&["limit"], &["limit", "checkpoints", "segment-size"]),
            Command::Parse => (&["expr"], &["expr", "at"]),
            Command::Star => (&["expr", "r"], &["expr", "r", "n0", "n-max"]),
            Command::Scan => (&["r", "limit"], &["r", "limit", "epsilon", "epsilon-grid", "n-lo", "segment-size"]),
            Command::Bounds => (&[], &[]),
        };
        let present = p.present();
        if let Some(extra) = present.iter().find(|f| !allowed.contains(f)) {
            return Err(usage(format!("--{extra} does not apply to '{}'", command.name())));
        }
        if let Some(missing) = required.iter().find(|f| !present.contains(f)) {
            return Err(usage(format!("'{}' requires --{missing}", command.name())));
        }
        if command == Command::Sieve && p.limit.is_none() && p.nth.is_none() {
            return Err(usage("'sieve' requires --limit or --nth"));
        }
        if p.epsilon.is_some() && p.epsilon_grid.is_some() {
            return Err(usage("--epsilon and --epsilon-grid are mutually exclusive"));
        }
        if p.epsilon_grid.as_ref().is_some_and(|g| g.is_empty()) {
            return Err(usage("--epsilon-grid is empty"));
        }
        let threads = p.threads.unwrap_or(1);
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }

        let path = match p.output.as_deref() {
            None | Some("-") => None,
            Some(path) => Some(PathBuf::from(path)),
        };
        let format =
            p.format.unwrap_or_else(|| match path.as_ref().and_then(|x| x.extension()).and_then(|e| e.to_str()) {
                Some("json") => Format::Json,
                Some("csv") => Format::Csv,
                Some("bin") => Format::Bin,
                _ => command.default_format(),
            });
        if format == Format::Bin && command != Command::Sieve {
            return Err(usage("--format bin is only available for 'sieve'"));
        }
        if format == Format::Bin && path.is_none() {
            return Err(usage("--format bin needs --out <file>"));
        }

        Ok(RunConfig {
            command,
            limit: p.limit,
            expression: p.expression,
            r: p.r,
            epsilon: p.epsilon,
            epsilon_grid: p.epsilon_grid,
            checkpoints: p.checkpoints,
            k: p.k.unwrap_or_else(|| DEFAULT_POLIGNAC_K.to_vec()),
            at: p.at.unwrap_or_else(|| DEFAULT_EVAL_POINTS.to_vec()),
            n0: p.n0.unwrap_or(2),
            n_max: p.n_max.unwrap_or(DEFAULT_STAR_N_MAX),
            n_lo: p.n_lo.unwrap_or(2),
            nth: p.nth,
            segment_size: p.segment_size,
            output: Output { path, format },
            threads,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan() -> PartialConfig {
        PartialConfig { command: Some(Command::Scan), r: Some(2.0), limit: Some(1000), ..Default::default() }
    }

    #[test]
    fn flags_win_over_file() {
        let file = PartialConfig { limit: Some(10), threads: Some(4), ..scan() };
        let flags = PartialConfig { limit: Some(99), ..Default::default() };
        let merged = flags.overlay(file);
        assert_eq!(merged.limit, Some(99));
        assert_eq!(merged.threads, Some(4));
    }

    #[test]
    fn required_and_forbidden_fields() {
        assert!(RunConfig::validate(scan()).is_ok());
        let p = PartialConfig { r: None, ..scan() };
        assert!(RunConfig::validate(p).unwrap_err().to_string().contains("--r"));
        let p = PartialConfig { expression: Some("n".into()), ..scan() };
        assert!(RunConfig::validate(p).unwrap_err().to_string().contains("--expr"));
        let p = PartialConfig { command: Some(Command::Bounds), ..Default::default() };
        assert!(RunConfig::validate(p).is_ok());
        assert!(RunConfig::validate(PartialConfig::default()).is_err());
    }

    #[test]
    fn format_from_extension() {
        let p = PartialConfig { output: Some("hits.json".into()), ..scan() };
        assert_eq!(RunConfig::validate(p).unwrap().output.format, Format::Json);
        let p = PartialConfig { output: Some("-".into()), ..scan() };
        let c = RunConfig::validate(p).unwrap();
        assert_eq!(c.output, Output { path: None, format: Format::Csv });
        let p = PartialConfig { format: Some(Format::Bin), output: Some("x".into()), ..scan() };
        assert!(RunConfig::validate(p).is_err());
    }

    #[test]
    fn toml_file_parses() {
        let text = "command = \"scan\"\nr = 2.0\nlimit = 1000\nepsilon_grid = [0.0, 0.5]\n";
        let p: PartialConfig = toml::from_str(text).unwrap();
        let c = RunConfig::validate(p).unwrap();
        assert_eq!(c.epsilon_grid, Some(vec![0.0, 0.5]));
        assert!(toml::from_str::<PartialConfig>("bogus = 1").is_err());
    }
}
