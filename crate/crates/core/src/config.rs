//! Flat `key = value` documents with `[section]` headers and dotted keys.
//!
//! ```text
//! # comment
//! [model]
//! A = 16
//! schedule.kind = two_pow_i_squared
//! ```
//!
//! Keys are stored fully qualified (`model.schedule.kind`).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate key '{key}' (first set on line {first})")]
    Duplicate { key: String, line: usize, first: usize },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { key: String, line: usize },
    #[error("missing required key '{0}'")]
    Missing(String),
    #[error("line {line}: invalid value for '{key}': {msg}")]
    Invalid { key: String, line: usize, msg: String },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KvDocument {
    entries: BTreeMap<String, Entry>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.split('.').all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

impl KvDocument {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax { line, msg: "unterminated section header".into() })?
                    .trim();
                if !valid_key(name) {
                    return Err(ConfigError::Syntax { line, msg: format!("bad section name '{name}'") });
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected 'key = value', got '{body}'") })?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(ConfigError::Syntax { line, msg: format!("bad key '{k}'") });
            }
            if v.is_empty() {
                return Err(ConfigError::Syntax { line, msg: format!("empty value for '{k}'") });
            }
            let v = v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v);
            let full = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if let Some(prev) = entries.get(&full) {
                return Err(ConfigError::Duplicate { key: full, line, first: prev.line });
            }
            entries.insert(full, Entry { value: v.to_string(), line });
        }
        Ok(KvDocument { entries })
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e))
    }

    pub fn invalid(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Invalid { key: key.into(), line: self.get(key).map_or(0, |e| e.line), msg: msg.into() }
    }

    fn require(&self, key: &str) -> Result<&Entry, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::Missing(key.into()))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64, ConfigError> {
        let e = self.require(key)?;
        e.value.parse::<f64>().map_err(|err| self.invalid(key, err.to_string()))
    }

    pub fn get_u64(&self, key: &str) -> Result<u64, ConfigError> {
        let e = self.require(key)?;
        e.value.parse::<u64>().map_err(|err| self.invalid(key, err.to_string()))
    }

    pub fn get_str(&self, key: &str) -> Result<&str, ConfigError> {
        Ok(self.require(key)?.value.as_str())
    }

    /// Rejects the first key not in `allowed` (fully qualified).
    pub fn check_known(&self, allowed: &[String]) -> Result<(), ConfigError> {
        let mut unknown: Vec<(&String, &Entry)> =
            self.entries.iter().filter(|(k, _)| !allowed.iter().any(|a| a == *k)).collect();
        unknown.sort_by_key(|(_, e)| e.line);
        match unknown.first() {
            Some((k, e)) => Err(ConfigError::UnknownKey { key: (*k).clone(), line: e.line }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for KvDocument {
    /// Canonical form: sorted fully qualified keys, one per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in &self.entries {
            writeln!(f, "{k} = {}", e.value)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let doc = KvDocument::parse("# top\nrun.seed = 7\n[model]\nA = 16 # trailing\nschedule.kind = \"factorial\"\n")
            .unwrap();
        assert_eq!(doc.get_u64("run.seed").unwrap(), 7);
        assert_eq!(doc.get_f64("model.A").unwrap(), 16.0);
        assert_eq!(doc.get_str("model.schedule.kind").unwrap(), "factorial");
        assert_eq!(doc.get("model.A").unwrap().line, 4);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(
            KvDocument::parse("a = 1\n\nnonsense\n"),
            Err(ConfigError::Syntax { line: 3, msg: "expected 'key = value', got 'nonsense'".into() })
        );
        assert!(matches!(
            KvDocument::parse("a = 1\na = 2\n"),
            Err(ConfigError::Duplicate { line: 2, first: 1, .. })
        ));
        let doc = KvDocument::parse("a = 1\ngamma = 2\n").unwrap();
        let err = doc.check_known(&["a".to_string()]).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "gamma".into(), line: 2 });
        assert!(err.to_string().contains("gamma"));
        let bad = KvDocument::parse("x = abc\n").unwrap();
        assert!(matches!(bad.get_f64("x"), Err(ConfigError::Invalid { line: 1, .. })));
        assert_eq!(bad.get_f64("y"), Err(ConfigError::Missing("y".into())));
    }

    #[test]
    fn canonical_display_is_sorted() {
        let doc = KvDocument::parse("[run]\nseed = 1\n[model]\nA = 16\n").unwrap();
        assert_eq!(doc.to_string(), "model.A = 16\nrun.seed = 1\n");
    }
}
