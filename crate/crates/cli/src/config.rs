//! Config files, profile files and flag value parsers.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use pst_forge::design::TimeClass;
use pst_forge::{CouplingProfile, Error, Geometry};

use crate::Format;

/// Defaults for any flag, read from `--config`. Keys are the flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub geometry: Option<Geometry>,
    pub couplings: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub profile_file: Option<PathBuf>,
    pub from: Option<usize>,
    pub to: Option<usize>,
    pub time: Option<TimeArg>,
    pub tmax: Option<TimeArg>,
    pub horizon: Option<TimeArg>,
    pub steps: Option<usize>,
    pub rounded: Option<bool>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub max_evals: Option<usize>,
    pub bounds: Option<String>,
    pub path_symmetric: Option<bool>,
    pub emax: Option<i64>,
    pub time_class: Option<TimeClass>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeArg {
    Value(f64),
    Free,
}

impl<'de> Deserialize<'de> for TimeArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(t) => check_positive(t).map(TimeArg::Value).map_err(serde::de::Error::custom),
            Raw::Text(s) => parse_time(&s).map_err(serde::de::Error::custom),
        }
    }
}

fn check_positive(t: f64) -> Result<f64, String> {
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("time must be positive, got {t}"))
    }
}

/// Accepts `free`, plain numbers and multiples of pi such as `pi`, `pi/2`,
/// `2pi`, `3*pi/4`.
pub fn parse_time(s: &str) -> Result<TimeArg, String> {
    let s = s.trim().to_ascii_lowercase();
    if s == "free" {
        return Ok(TimeArg::Free);
    }
    let bad = || format!("cannot parse time {s:?} (use a number, pi, pi/2, 3pi/4 or free)");
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(at) => {
            let coef = s[..at].trim_end_matches('*').trim();
            let coef = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>().map_err(|_| bad())?
            };
            let rest = s[at + 2..].trim();
            let div = match rest.strip_prefix('/') {
                Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            coef * PI / div
        }
    };
    check_positive(value).map(TimeArg::Value)
}

pub fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("bounds must look like lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    Ok((lo, hi))
}

/// Reads a profile from JSON: a bare profile object, or any object holding
/// one under `profile` or `best_profile`.
pub fn load_profile(path: &Path) -> Result<CouplingProfile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read profile {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("bad profile JSON: {e}")))?;
    let inner = ["profile", "best_profile"]
        .iter()
        .find_map(|k| value.get(k))
        .unwrap_or(&value);
    serde_json::from_value(inner.clone()).map_err(|e| Error::InvalidArgument(format!("bad profile JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_literals() {
        assert_eq!(parse_time("pi").unwrap(), TimeArg::Value(PI));
        assert_eq!(parse_time("pi/2").unwrap(), TimeArg::Value(PI / 2.0));
        assert_eq!(parse_time("3*pi/4").unwrap(), TimeArg::Value(3.0 * PI / 4.0));
        assert_eq!(parse_time("2pi").unwrap(), TimeArg::Value(2.0 * PI));
        assert_eq!(parse_time("1.5").unwrap(), TimeArg::Value(1.5));
        assert_eq!(parse_time("FREE").unwrap(), TimeArg::Free);
        assert!(parse_time("-1").is_err());
        assert!(parse_time("pie").is_err());
        assert!(parse_time("0").is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(parse_bounds("0.01:5").unwrap(), (0.01, 5.0));
        assert!(parse_bounds("0.01").is_err());
        assert!(parse_bounds("a:1").is_err());
    }
}
