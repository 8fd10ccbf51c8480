//! Strict scenario-configuration parser.
//!
//! The format is a flat key–value document with `[section]` headers, `#`
//! comments, and one `key = value` per line. Every key must be consumed by
//! the command that loads the file; leftovers are configuration errors, so
//! typos never pass silently.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug)]
pub struct Config {
    values: BTreeMap<(String, String), String>,
    consumed: BTreeSet<(String, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(k) => &raw[..k],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(format!("line {}: malformed section header", lineno + 1));
                };
                section = name.trim().to_string();
                if section.is_empty() {
                    return Err(format!("line {}: empty section name", lineno + 1));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                ));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(format!("line {}: empty key or value", lineno + 1));
            }
            if section.is_empty() {
                return Err(format!(
                    "line {}: key `{key}` appears before any [section]",
                    lineno + 1
                ));
            }
            if values
                .insert((section.clone(), key.clone()), value)
                .is_some()
            {
                return Err(format!(
                    "line {}: duplicate key `{section}.{key}`",
                    lineno + 1
                ));
            }
        }
        Ok(Self {
            values,
            consumed: BTreeSet::new(),
        })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        let id = (section.to_string(), key.to_string());
        let v = self.values.get(&id).cloned();
        if v.is_some() {
            self.consumed.insert(id);
        }
        v
    }

    pub fn get_f64(&mut self, section: &str, key: &str) -> Result<Option<f64>, String> {
        match self.take(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("{section}.{key}: `{s}` is not a number")),
        }
    }

    pub fn f64_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64, String> {
        Ok(self.get_f64(section, key)?.unwrap_or(default))
    }

    pub fn get_usize(&mut self, section: &str, key: &str) -> Result<Option<usize>, String> {
        match self.take(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| format!("{section}.{key}: `{s}` is not a non-negative integer")),
        }
    }

    pub fn usize_or(&mut self, section: &str, key: &str, default: usize) -> Result<usize, String> {
        Ok(self.get_usize(section, key)?.unwrap_or(default))
    }

    pub fn get_u64(&mut self, section: &str, key: &str) -> Result<Option<u64>, String> {
        match self.take(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<u64>()
                .map(Some)
                .map_err(|_| format!("{section}.{key}: `{s}` is not an unsigned integer")),
        }
    }

    pub fn str_or(&mut self, section: &str, key: &str, default: &str) -> String {
        self.take(section, key)
            .unwrap_or_else(|| default.to_string())
    }

    /// Comma-separated list of numbers.
    pub fn get_f64_list(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>, String> {
        match self.take(section, key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|part| {
                    let part = part.trim();
                    part.parse::<f64>()
                        .map_err(|_| format!("{section}.{key}: `{part}` is not a number"))
                })
                .collect::<Result<Vec<f64>, String>>()
                .map(Some),
        }
    }

    /// Errors if any key was never consumed.
    pub fn finish(self) -> Result<(), String> {
        let leftover: Vec<String> = self
            .values
            .keys()
            .filter(|id| !self.consumed.contains(*id))
            .map(|(s, k)| format!("{s}.{k}"))
            .collect();
        if leftover.is_empty() {
            Ok(())
        } else {
            Err(format!("unknown key(s): {}", leftover.join(", ")))
        }
    }
}
