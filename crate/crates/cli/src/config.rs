//! Line-oriented `key = value` configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Syntax { line: usize, text: String },
    Duplicate { key: String, line: usize, first: usize },
    TypeMismatch { key: String, expected: &'static str, value: String },
    Missing(Vec<String>),
    Unknown(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            ConfigError::Syntax { line, text } => {
                write!(f, "line {line}: expected `key = value`, got `{text}`")
            }
            ConfigError::Duplicate { key, line, first } => {
                write!(f, "line {line}: duplicate key `{key}` (first set on line {first})")
            }
            ConfigError::TypeMismatch { key, expected, value } => {
                write!(f, "key `{key}`: expected {expected}, got `{value}`")
            }
            ConfigError::Missing(keys) => write!(f, "missing required keys: {}", keys.join(", ")),
            ConfigError::Unknown(keys) => write!(f, "unknown keys: {}", keys.join(", ")),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Where a value came from: a 1-based file line, or a command-line flag (line 0).
#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
    pub source: Option<PathBuf>,
}

impl Config {
    pub fn parse_str(text: &str) -> Result<Config, ConfigError> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: content.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line, text: content.to_string() });
            }
            if let Some(prev) = entries.get(key) {
                return Err(ConfigError::Duplicate { key: key.to_string(), line, first: prev.line });
            }
            entries.insert(key.to_string(), Entry { value: value.to_string(), line });
        }
        Ok(Config { entries, source: None })
    }

    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut cfg = Config::parse_str(&text)?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    /// Flag values win over file values.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), Entry { value: value.into(), line: 0 });
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    /// Rejects unknown keys, then reports every missing required key at once.
    pub fn validate(&self, allowed: &[&str], required: &[&str]) -> Result<(), ConfigError> {
        let unknown: Vec<String> = self
            .entries
            .keys()
            .filter(|k| !allowed.contains(&k.as_str()))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(ConfigError::Unknown(unknown));
        }
        let missing: Vec<String> = required
            .iter()
            .filter(|k| !self.entries.contains_key(**k))
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        Ok(())
    }

    fn typed<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| ConfigError::TypeMismatch {
                key: key.to_string(),
                expected,
                value: v.to_string(),
            }),
        }
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.typed(key, "a real number")?;
        match v {
            Some(x) if !x.is_finite() => Err(ConfigError::TypeMismatch {
                key: key.to_string(),
                expected: "a finite real number",
                value: self.raw(key).unwrap_or_default().to_string(),
            }),
            other => Ok(other),
        }
    }

    pub fn integer(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.typed(key, "a nonnegative integer")
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    /// One of a fixed set of words.
    pub fn choice(&self, key: &str, options: &'static [&'static str]) -> Result<Option<&str>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) if options.contains(&v) => Ok(Some(v)),
            Some(v) => Err(ConfigError::TypeMismatch {
                key: key.to_string(),
                expected: "one of the listed options",
                value: v.to_string(),
            }),
        }
    }

    /// Whitespace-separated reals.
    pub fn reals(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|w| w.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| ConfigError::TypeMismatch {
                    key: key.to_string(),
                    expected: "a list of real numbers",
                    value: v.to_string(),
                }),
        }
    }
}
