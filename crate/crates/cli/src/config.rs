//! Flat key-value config files. One `key = value` per line, `#` comments;
//! CLI flags take precedence over config entries.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// `flag` wins; otherwise the config value for `key`; otherwise `default`.
    pub fn resolve<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v.clone());
        }
        match self.entries.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("config key `{key}`: bad value `{raw}`: {e}")),
            None => Ok(default),
        }
    }

    /// Same, but with no default: `None` when neither side provides it.
    pub fn resolve_opt<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        match self.entries.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: bad value `{raw}`: {e}")),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_key_values() {
        let cfg = Config::parse("n = 500\nbeta=0.26 # inline comment\n\n# full comment\ndist = exponential mu=0.5\n").unwrap();
        assert_eq!(cfg.raw("n"), Some("500"));
        assert_eq!(cfg.raw("beta"), Some("0.26"));
        assert_eq!(cfg.raw("dist"), Some("exponential mu=0.5"));
    }

    #[test]
    fn flags_override_config() {
        let cfg = Config::parse("runs = 50").unwrap();
        assert_eq!(cfg.resolve(&Some(10usize), "runs", 1).unwrap(), 10);
        assert_eq!(cfg.resolve(&None, "runs", 1).unwrap(), 50);
        assert_eq!(cfg.resolve(&None, "missing", 7).unwrap(), 7);
    }

    #[test]
    fn bad_values_error_out() {
        let cfg = Config::parse("runs = many").unwrap();
        assert!(cfg.resolve(&None::<usize>, "runs", 1).is_err());
        assert!(Config::parse("no equals sign here").is_err());
    }
}
