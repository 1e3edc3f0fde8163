//! Scan configuration: a `key = value` file, overridden field by field by
//! command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use toruswalk::{BuiltinSpec, GeneratorMatrix};

use crate::error::{CliError, CliResult};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_RESOLUTION: u32 = 512;
pub const DEFAULT_HMAX: u64 = 1000;

/// Where the generator matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Builtin(String),
}

impl Source {
    pub fn load(&self, seed: u64) -> CliResult<GeneratorMatrix> {
        match self {
            Source::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                Ok(GeneratorMatrix::parse_text(&text)?)
            }
            Source::Builtin(spec) => Ok(spec.parse::<BuiltinSpec>()?.build(Some(seed))?),
        }
    }

    pub fn from_flags(matrix: Option<&Path>, builtin: Option<&str>) -> CliResult<Option<Source>> {
        match (matrix, builtin) {
            (Some(_), Some(_)) => Err(CliError::config("--matrix and --builtin are mutually exclusive")),
            (Some(p), None) => Ok(Some(Source::File(p.to_path_buf()))),
            (None, Some(b)) => Ok(Some(Source::Builtin(b.to_string()))),
            (None, None) => Ok(None),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::File(p) => write!(f, "file:{}", p.display()),
            Source::Builtin(s) => write!(f, "builtin:{s}"),
        }
    }
}

/// How each row's discrepancy is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Exact walk and exact discrepancy while within caps, then the grid
    /// estimator, then simulation.
    Auto,
    Exact,
    Grid,
    Mc,
}

impl FromStr for Policy {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "auto" => Ok(Policy::Auto),
            "exact" => Ok(Policy::Exact),
            "grid" => Ok(Policy::Grid),
            "mc" => Ok(Policy::Mc),
            other => Err(CliError::config(format!(
                "unknown method {other:?} (auto|exact|grid|mc)"
            ))),
        }
    }
}

/// Parses a k schedule: comma separated items, each `N`, `A..B` (inclusive)
/// or `2^A..2^B` (powers of two). The result is sorted and deduplicated.
pub fn parse_k_schedule(s: &str) -> CliResult<Vec<u32>> {
    let mut ks = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => match (a.trim().strip_prefix("2^"), b.trim().strip_prefix("2^")) {
                (Some(a), Some(b)) => {
                    let (a, b) = (parse_u32(a, item)?, parse_u32(b, item)?);
                    if b > 31 {
                        return Err(CliError::config(format!("{item:?}: exponent above 31")));
                    }
                    ks.extend((a..=b).map(|e| 1u32 << e));
                }
                (None, None) => ks.extend(parse_u32(a, item)?..=parse_u32(b, item)?),
                _ => return Err(CliError::config(format!("{item:?}: mixed range ends"))),
            },
            None => match item.strip_prefix("2^") {
                Some(e) => {
                    let e = parse_u32(e, item)?;
                    if e > 31 {
                        return Err(CliError::config(format!("{item:?}: exponent above 31")));
                    }
                    ks.push(1 << e)
                }
                None => ks.push(parse_u32(item, item)?),
            },
        }
    }
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(CliError::config(format!("empty k schedule {s:?}")));
    }
    if ks[0] == 0 {
        return Err(CliError::config("k schedule must not contain 0"));
    }
    Ok(ks)
}

fn parse_u32(s: &str, item: &str) -> CliResult<u32> {
    s.trim()
        .parse()
        .map_err(|_| CliError::config(format!("bad integer {s:?} in k schedule item {item:?}")))
}

/// Every field optional, so a file and a flag set can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub source: Option<Source>,
    pub k_schedule: Option<String>,
    pub method: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub resolution: Option<u32>,
    pub ca: Option<f64>,
    pub hmax: Option<u64>,
    pub out: Option<PathBuf>,
    pub svg: Option<bool>,
}

impl RawConfig {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut raw = RawConfig::default();
        let mut matrix = None;
        let mut builtin = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let bad = |what: &str| CliError::config(format!("line {}: bad {what} {value:?}", lineno + 1));
            match key {
                "matrix" => matrix = Some(PathBuf::from(&value)),
                "builtin" => builtin = Some(value.clone()),
                "k_schedule" | "k" => raw.k_schedule = Some(value.clone()),
                "method" => raw.method = Some(value.clone()),
                "trials" => raw.trials = Some(value.parse().map_err(|_| bad("trials"))?),
                "seed" => raw.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "resolution" => raw.resolution = Some(value.parse().map_err(|_| bad("resolution"))?),
                "ca" => raw.ca = Some(value.parse().map_err(|_| bad("ca"))?),
                "hmax" => raw.hmax = Some(value.parse().map_err(|_| bad("hmax"))?),
                "out" => raw.out = Some(PathBuf::from(&value)),
                "svg" => raw.svg = Some(value.parse().map_err(|_| bad("svg"))?),
                other => return Err(CliError::config(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        raw.source = Source::from_flags(matrix.as_deref(), builtin.as_deref())?;
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Fields set in `over` win.
    pub fn overridden_by(self, over: RawConfig) -> RawConfig {
        RawConfig {
            source: over.source.or(self.source),
            k_schedule: over.k_schedule.or(self.k_schedule),
            method: over.method.or(self.method),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            resolution: over.resolution.or(self.resolution),
            ca: over.ca.or(self.ca),
            hmax: over.hmax.or(self.hmax),
            out: over.out.or(self.out),
            svg: over.svg.or(self.svg),
        }
    }

    pub fn resolve(self) -> CliResult<ScanConfig> {
        let source = self
            .source
            .ok_or_else(|| CliError::config("no generator source: set matrix or builtin"))?;
        let k_schedule = parse_k_schedule(
            self.k_schedule
                .as_deref()
                .ok_or_else(|| CliError::config("no k schedule"))?,
        )?;
        let method = match self.method {
            Some(m) => m.parse()?,
            None => Policy::Auto,
        };
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::config("trials must be ≥ 1"));
        }
        let resolution = self.resolution.unwrap_or(DEFAULT_RESOLUTION);
        if resolution < 2 {
            return Err(CliError::config("resolution must be ≥ 2"));
        }
        let hmax = self.hmax.unwrap_or(DEFAULT_HMAX);
        if hmax == 0 {
            return Err(CliError::config("hmax must be ≥ 1"));
        }
        if let Some(c) = self.ca {
            if !(c.is_finite() && c > 0.0) {
                return Err(CliError::config(format!("ca must be positive, got {c}")));
            }
        }
        Ok(ScanConfig {
            source,
            k_schedule,
            method,
            trials,
            seed: self.seed.unwrap_or(0),
            resolution,
            ca: self.ca,
            hmax,
            out: self.out,
            svg: self.svg.unwrap_or(false),
        })
    }
}

/// A validated scan configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub source: Source,
    pub k_schedule: Vec<u32>,
    pub method: Policy,
    pub trials: u64,
    pub seed: u64,
    pub resolution: u32,
    pub ca: Option<f64>,
    pub hmax: u64,
    pub out: Option<PathBuf>,
    pub svg: bool,
}
