//! Minimal `key = value` text format shared by scenario files and run
//! manifests. `#` starts a comment; blank lines are ignored.

use std::collections::BTreeMap;

use super::IoError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (String, usize)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| IoError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(IoError::Syntax {
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            if entries
                .insert(key.to_string(), (value.trim().to_string(), line_no))
                .is_some()
            {
                return Err(IoError::DuplicateKey(key.to_string()));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Errors listing every key of `required` that is absent.
    pub fn require_all(&self, required: &[&str]) -> Result<(), IoError> {
        let missing: Vec<String> = required
            .iter()
            .filter(|k| !self.entries.contains_key(**k))
            .map(|k| k.to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(IoError::MissingKeys(missing))
        }
    }

    /// Errors listing every key not accepted by `allowed`.
    pub fn reject_unknown(&self, allowed: impl Fn(&str) -> bool) -> Result<(), IoError> {
        let unknown: Vec<String> = self
            .keys()
            .filter(|k| !allowed(k))
            .map(str::to_string)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(IoError::UnknownKeys(unknown))
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, IoError> {
        let v = self
            .get(key)
            .ok_or_else(|| IoError::MissingKeys(vec![key.to_string()]))?;
        parse_f64(key, v)
    }

    /// A number optionally followed by a unit token that must equal `unit`.
    pub fn quantity(&self, key: &str, unit: &str) -> Result<f64, IoError> {
        let v = self
            .get(key)
            .ok_or_else(|| IoError::MissingKeys(vec![key.to_string()]))?;
        let mut parts = v.split_whitespace();
        let number = parts.next().unwrap_or("");
        let value = parse_f64(key, number)?;
        match (parts.next(), parts.next()) {
            (None, _) => Ok(value),
            (Some(u), None) if u == unit || unit.is_empty() && u == "1" => Ok(value),
            (Some(u), _) => Err(IoError::BadUnit {
                key: key.to_string(),
                expected: if unit.is_empty() {
                    "dimensionless".into()
                } else {
                    unit.to_string()
                },
                got: u.to_string(),
            }),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64, IoError> {
        let v = self
            .get(key)
            .ok_or_else(|| IoError::MissingKeys(vec![key.to_string()]))?;
        v.parse().map_err(|_| IoError::BadValue {
            key: key.to_string(),
            value: v.to_string(),
        })
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, IoError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(IoError::BadValue {
            key: key.to_string(),
            value: v.to_string(),
        }),
    }
}
