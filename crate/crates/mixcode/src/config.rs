//! Flat `key=value` config files and run manifests.
//!
//! One pair per line, `#` starts a comment line, blank lines are ignored.
//! Flags given on the command line take precedence over file values.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
}

pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            reason: "expected `key=value`".into(),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                reason: "empty key".into(),
            });
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                reason: format!("duplicate key `{k}`"),
            });
        }
    }
    Ok(out)
}

/// Resolves settings from flags, then the config file, then defaults, and
/// records every resolved value for the manifest.
#[derive(Debug, Default)]
pub struct Resolver {
    file: BTreeMap<String, String>,
    used: Vec<(String, String)>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Resolver {
        Resolver { file, used: Vec::new() }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }

    fn record(&mut self, key: &str, value: String) {
        self.used.retain(|(k, _)| k != key);
        self.used.push((key.to_string(), value));
    }

    /// `flag`, else the file's value for `key`, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, ConfigError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.raw(key) {
                Some(s) => s.parse().map_err(|e: T::Err| ConfigError::Value {
                    key: key.into(),
                    value: s.into(),
                    reason: e.to_string(),
                })?,
                None => default,
            },
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    /// Like [`Resolver::get`] without a default; unset keys stay unset.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, ConfigError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.raw(key) {
                Some(s) => Some(s.parse().map_err(|e: T::Err| ConfigError::Value {
                    key: key.into(),
                    value: s.into(),
                    reason: e.to_string(),
                })?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    /// Record a value that is not read from flags or the file.
    pub fn set(&mut self, key: &str, value: impl Display) {
        self.record(key, value.to_string());
    }

    /// Fail on file keys that no setting consumed.
    pub fn check_unused(&self, ignore: &[&str]) -> Result<(), ConfigError> {
        for k in self.file.keys() {
            if !ignore.contains(&k.as_str()) && !self.used.iter().any(|(u, _)| u == k) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
        }
        Ok(())
    }

    /// The manifest text: every resolved setting in resolution order.
    pub fn manifest(&self) -> String {
        let mut out = String::from("# mixcode run manifest; rerun with --config <this file>\n");
        for (k, v) in &self.used {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// A comma-separated list that parses and prints like its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T> {
    type Err = T::Err;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(List(Vec::new()));
        }
        s.split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}
