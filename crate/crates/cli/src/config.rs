//! Flat `key = value` settings merged from a config file and command-line
//! flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

/// Keys accepted in config files. Flags use the same names with `-` for `_`.
pub const KEYS: &[&str] = &[
    "beta",
    "a",
    "ratio",
    "alpha2",
    "tau_max",
    "tau_samples",
    "ncut",
    "kmax",
    "n",
    "n_min",
    "n_max",
    "objective",
    "top",
    "rescore_top",
    "rescore_alpha2",
    "out",
    "format",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!("config: line {}: expected `key = value`", i + 1)));
            };
            s.set(key.trim(), value.trim())?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(CliError::Validation(format!("config: unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| missing(key))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn usize_opt(&self, key: &str) -> Result<Option<usize>> {
        self.get(key).map(|v| v.parse::<usize>().map_err(|e| CliError::config(key, e))).transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.usize_opt(key)?.unwrap_or(default))
    }

    /// A list written as `x1,x2,...` or as an inclusive range
    /// `start:stop:step`.
    pub fn list_opt(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|v| parse_list(key, v)).transpose()
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.list_opt(key)?.ok_or_else(|| missing(key))
    }

    /// Items as written, for echoing into output metadata.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn missing(key: &str) -> CliError {
    CliError::Validation(format!("config: missing required value `{key}`"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|e| CliError::config(key, format!("{v:?}: {e}")))?;
    if !x.is_finite() {
        return Err(CliError::config(key, "must be finite"));
    }
    Ok(x)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(key, start)?, parse_f64(key, stop)?, parse_f64(key, step)?);
            if step <= 0.0 || stop < start {
                return Err(CliError::config(key, "range needs start <= stop and step > 0"));
            }
            Ok(rabi_aa::search::linspace_step(start, stop, step))
        }
        [_] => v.split(',').map(|x| parse_f64(key, x.trim())).collect(),
        _ => Err(CliError::config(key, "expected `x1,x2,...` or `start:stop:step`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_format() {
        let s = Settings::parse("# comment\nbeta = 0.2\n\n a=-0.6 \nalpha2 = 28, 47,70\n").unwrap();
        assert_eq!(s.f64("beta").unwrap(), 0.2);
        assert_eq!(s.f64("a").unwrap(), -0.6);
        assert_eq!(s.list("alpha2").unwrap(), [28.0, 47.0, 70.0]);
        assert!(s.f64_opt("ratio").unwrap().is_none());
    }

    #[test]
    fn ranges() {
        let s = Settings::parse("beta = 0.4:0.65:0.005").unwrap();
        assert_eq!(s.list("beta").unwrap().len(), 51);
        assert!(Settings::parse("beta = 0.5:0.4:0.01").unwrap().list("beta").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Settings::parse("bogus = 1"), Err(CliError::Validation(_))));
        assert!(matches!(Settings::parse("beta 0.2"), Err(CliError::Validation(_))));
        let s = Settings::parse("beta = x\nncut = -3").unwrap();
        assert!(s.f64("beta").unwrap_err().to_string().contains("`beta`"));
        assert!(s.usize_opt("ncut").is_err());
        assert!(s.f64("ratio").unwrap_err().to_string().contains("missing"));
    }
}
