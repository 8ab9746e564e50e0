//! Optional config file: `[section]` tables of scalar keys.
//!
//! ```toml
//! workers = 4
//!
//! [failure]
//! degree = 8
//!
//! [simulate]
//! trials = 1000000
//! seed = 7
//! ```
//!
//! Top-level keys apply to every command; a command's own section overrides
//! them. Command-line flags override both.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use toml::{Table, Value};

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    global: Table,
    sections: BTreeMap<String, Table>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
        let mut cfg = Self::default();
        for (k, v) in table {
            match v {
                Value::Table(t) => {
                    if let Some((bad, _)) = t.iter().find(|(_, v)| v.is_table()) {
                        return Err(ConfigError(format!("[{k}] {bad}: nested tables are not supported")));
                    }
                    cfg.sections.insert(k, t);
                }
                other => {
                    cfg.global.insert(k, other);
                }
            }
        }
        Ok(cfg)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&Value> {
        self.sections
            .get(section)
            .and_then(|t| t.get(key))
            .or_else(|| self.global.get(key))
    }

    pub fn string(&self, section: &str, key: &str) -> Result<Option<String>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Integer(i)) => Ok(Some(i.to_string())),
            Some(Value::Float(x)) => Ok(Some(x.to_string())),
            Some(Value::Boolean(b)) => Ok(Some(b.to_string())),
            Some(v) => Err(ConfigError(format!("{section}.{key}: unsupported value {v}"))),
        }
    }

    pub fn integer(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => Err(ConfigError(format!(
                "{section}.{key}: expected a non-negative integer, got {v}"
            ))),
        }
    }

    pub fn float(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(ConfigError(format!("{section}.{key}: expected a number, got {v}"))),
        }
    }

    pub fn boolean(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(ConfigError(format!("{section}.{key}: expected true or false, got {v}"))),
        }
    }
}

/// Resolved settings, printed under `--verbose`.
#[derive(Debug, Default)]
pub struct Resolved {
    entries: Vec<(String, String)>,
}

impl Resolved {
    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }
}

impl fmt::Display for Resolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "# {k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_override_globals() {
        let cfg = FileConfig::parse("workers = 2\nseed = 1\n[simulate]\nseed = 9\n").unwrap();
        assert_eq!(cfg.integer("simulate", "seed").unwrap(), Some(9));
        assert_eq!(cfg.integer("failure", "seed").unwrap(), Some(1));
        assert_eq!(cfg.integer("simulate", "workers").unwrap(), Some(2));
        assert_eq!(cfg.integer("simulate", "trials").unwrap(), None);
    }

    #[test]
    fn type_errors() {
        let cfg = FileConfig::parse("[simulate]\ntrials = \"many\"\npq = 1\n").unwrap();
        assert!(cfg.integer("simulate", "trials").is_err());
        assert_eq!(cfg.float("simulate", "pq").unwrap(), Some(1.0));
        assert!(FileConfig::parse("[a]\n[a.b]\nx = 1\n").is_err());
        assert!(FileConfig::parse("= 3").is_err());
    }
}
