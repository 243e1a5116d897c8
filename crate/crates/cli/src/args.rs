//! Value parsers for command-line flags and config entries.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use colheat::dynamics::InitialCondition;
use colheat::spin::{symmetric_weights, thermal_product_weights};
use colheat::{weights_file, BlockWeights, SpinEnsemble};

use crate::error::{CliError, CliResult};

/// Largest number of grid points accepted.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses a spin as `"k/2"` or an integer and returns `2s`.
pub fn parse_spin(text: &str) -> CliResult<u32> {
    let t = text.trim();
    let bad = || CliError::usage(format!("spin must look like 1/2, 3/2 or 1, got {text:?}"));
    let two_s = match t.split_once('/') {
        Some((num, "2")) => {
            let k: u32 = num.trim().parse().map_err(|_| bad())?;
            if k % 2 == 0 {
                return Err(CliError::usage(format!(
                    "{text:?} is an integer spin; write it as {}",
                    k / 2
                )));
            }
            k
        }
        Some(_) => return Err(bad()),
        None => t
            .parse::<u32>()
            .map_err(|_| bad())?
            .checked_mul(2)
            .ok_or_else(bad)?,
    };
    if two_s == 0 {
        return Err(CliError::usage("spin must be positive"));
    }
    Ok(two_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Log,
    Lin,
}

/// `lo:hi:points:log|lin`, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize, scale: Scale) -> CliResult<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(CliError::usage("grid bounds must be finite"));
        }
        if lo > hi {
            return Err(CliError::usage(format!(
                "grid bounds out of order: {lo} > {hi}"
            )));
        }
        match scale {
            Scale::Log if lo <= 0.0 => return Err(CliError::usage("a log grid needs lo > 0")),
            Scale::Lin if lo < 0.0 => return Err(CliError::usage("a lin grid needs lo >= 0")),
            _ => {}
        }
        if points > MAX_GRID_POINTS {
            return Err(CliError::usage(format!(
                "at most {MAX_GRID_POINTS} grid points"
            )));
        }
        Ok(Self {
            lo,
            hi,
            points,
            scale,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => {
                let last = (n - 1) as f64;
                let mut v: Vec<f64> = (0..n)
                    .map(|i| {
                        let f = i as f64 / last;
                        match self.scale {
                            Scale::Lin => self.lo + f * (self.hi - self.lo),
                            Scale::Log => self.lo * (f * (self.hi / self.lo).ln()).exp(),
                        }
                    })
                    .collect();
                v[n - 1] = self.hi;
                v
            }
        }
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let [lo, hi, points, scale] = parts[..] else {
            return Err(CliError::usage(format!(
                "grid must be lo:hi:points:log|lin, got {text:?}"
            )));
        };
        let num = |s: &str| -> CliResult<f64> {
            parse_number(s)
                .ok_or_else(|| CliError::usage(format!("grid bound {s:?} is not a number")))
        };
        let points: usize = points.trim().parse().map_err(|_| {
            CliError::usage(format!("grid point count {points:?} is not an integer"))
        })?;
        let scale = match scale.trim() {
            "log" => Scale::Log,
            "lin" => Scale::Lin,
            other => {
                return Err(CliError::usage(format!(
                    "grid scale must be log or lin, got {other:?}"
                )))
            }
        };
        Grid::new(num(lo)?, num(hi)?, points, scale)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = match self.scale {
            Scale::Log => "log",
            Scale::Lin => "lin",
        };
        write!(f, "{}:{}:{}:{}", self.lo, self.hi, self.points, scale)
    }
}

/// A finite number, also accepting `a/b` fractions such as `1/30`.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    let v = match t.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => t.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Where the sector weights of the initial state come from.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightsArg {
    Symmetric,
    Thermal(f64),
    File(PathBuf),
}

impl FromStr for WeightsArg {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let t = text.trim();
        if t == "symmetric" {
            return Ok(WeightsArg::Symmetric);
        }
        match t.split_once('=') {
            Some(("thermal", b0)) => parse_number(b0).map(WeightsArg::Thermal).ok_or_else(|| {
                CliError::usage(format!("thermal=<b0> needs a finite number, got {b0:?}"))
            }),
            Some(("file", path)) if !path.is_empty() => Ok(WeightsArg::File(PathBuf::from(path))),
            _ => Err(CliError::usage(format!(
                "weights must be symmetric, thermal=<b0> or file=<path>, got {text:?}"
            ))),
        }
    }
}

impl fmt::Display for WeightsArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightsArg::Symmetric => write!(f, "symmetric"),
            WeightsArg::Thermal(b0) => write!(f, "thermal={b0}"),
            WeightsArg::File(p) => write!(f, "file={}", p.display()),
        }
    }
}

impl WeightsArg {
    pub fn resolve(&self, ensemble: &SpinEnsemble) -> CliResult<BlockWeights> {
        match self {
            WeightsArg::Symmetric => Ok(symmetric_weights(ensemble)),
            WeightsArg::Thermal(b0) => Ok(thermal_product_weights(ensemble, *b0)?),
            WeightsArg::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                weights_file::parse(&text, ensemble)
                    .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
            }
        }
    }
}

/// `ground | top | uniform | thermal=<b0>`.
pub fn parse_init(text: &str) -> CliResult<InitialCondition> {
    match text.trim() {
        "ground" => Ok(InitialCondition::Ground),
        "top" => Ok(InitialCondition::Top),
        "uniform" => Ok(InitialCondition::Uniform),
        t => {
            match t.split_once('=') {
                Some(("thermal", b0)) => parse_number(b0)
                    .map(InitialCondition::Thermal)
                    .ok_or_else(|| {
                        CliError::usage(format!("thermal=<b0> needs a finite number, got {b0:?}"))
                    }),
                _ => Err(CliError::usage(format!(
                    "init must be ground, top, uniform or thermal=<b0>, got {text:?}"
                ))),
            }
        }
    }
}

/// Flag values from a TOML file of top-level `key = value` entries. Keys
/// are flag names without the leading dashes, `_` and `-` interchangeable;
/// arrays become comma-separated lists.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::usage(format!("config: {}", e.message())))?;
    let mut out = Vec::with_capacity(table.len());
    for (key, value) in table {
        let key = key.replace('_', "-");
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
        {
            return Err(CliError::usage(format!("config: bad key {key:?}")));
        }
        let scalar = |v: &toml::Value| -> CliResult<String> {
            match v {
                toml::Value::String(s) => Ok(s.clone()),
                toml::Value::Integer(i) => Ok(i.to_string()),
                toml::Value::Float(f) => Ok(f.to_string()),
                toml::Value::Boolean(b) => Ok(b.to_string()),
                _ => Err(CliError::usage(format!(
                    "config: {key} must be a string, number or boolean"
                ))),
            }
        };
        let text = match &value {
            toml::Value::Array(items) => items
                .iter()
                .map(scalar)
                .collect::<CliResult<Vec<_>>>()?
                .join(","),
            v => scalar(v)?,
        };
        if text.is_empty() {
            return Err(CliError::usage(format!("config: empty value for {key}")));
        }
        out.push((key, text));
    }
    Ok(out)
}
