//! Flat `key = value` settings with `[section]` headers.
//!
//! A file section `[model]` holding `n = 50` becomes the key `model.n`.
//! `--set model.n=60` overrides file values, which override defaults. Every
//! key must be declared by the experiment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use toml::Value;

/// Rejected configuration; maps to the usage exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Declared key with its default, as a TOML literal.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// Resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, Value>,
}

fn parse_literal(raw: &str) -> Result<Value, ConfigError> {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => Ok(t.remove("v").expect("parsed key")),
        // bare words are taken as strings
        Err(_) if !raw.is_empty() && raw.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) => {
            Ok(Value::String(raw.to_string()))
        }
        Err(e) => err(format!("cannot parse value `{raw}`: {}", e.message())),
    }
}

fn flatten(table: toml::Table) -> Result<Vec<(String, Value)>, ConfigError> {
    let mut out = Vec::new();
    for (k, v) in table {
        match v {
            Value::Table(inner) => {
                for (k2, v2) in inner {
                    if v2.is_table() {
                        return err(format!("nested section `{k}.{k2}` is not supported"));
                    }
                    out.push((format!("{k}.{k2}"), v2));
                }
            }
            other => out.push((k, other)),
        }
    }
    Ok(out)
}

fn same_kind(a: &Value, b: &Value) -> bool {
    matches!(
        (a, b),
        (Value::Float(_) | Value::Integer(_), Value::Float(_) | Value::Integer(_))
            | (Value::String(_), Value::String(_))
            | (Value::Boolean(_), Value::Boolean(_))
            | (Value::Array(_), Value::Array(_))
    )
}

impl Settings {
    /// Defaults, then the file, then `--set` pairs, checked against `schema`.
    pub fn resolve(schema: &[KeySpec], file: Option<&str>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for k in schema {
            values.insert(k.key.to_string(), parse_literal(k.default)?);
        }
        let mut layer = Vec::new();
        if let Some(text) = file {
            let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(format!("config: {}", e.message())))?;
            layer.extend(flatten(table)?);
        }
        for o in overrides {
            let Some((k, v)) = o.split_once('=') else {
                return err(format!("--set expects key=value, got `{o}`"));
            };
            layer.push((k.trim().to_string(), parse_literal(v.trim())?));
        }
        for (k, v) in layer {
            let Some(default) = values.get(&k) else {
                let known: Vec<&str> = schema.iter().map(|s| s.key).collect();
                return err(format!("unknown key `{k}`; accepted keys: {}", known.join(", ")));
            };
            if !same_kind(default, &v) {
                return err(format!("key `{k}` expects a value like `{default}`, got `{v}`"));
            }
            values.insert(k, v);
        }
        Ok(Self { values })
    }

    pub fn load(schema: &[KeySpec], path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?),
            None => None,
        };
        Self::resolve(schema, text.as_deref(), overrides)
    }

    fn get(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or_else(|| panic!("undeclared key {key}"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        match self.get(key) {
            Value::Float(x) if x.is_finite() => Ok(*x),
            Value::Integer(i) => Ok(*i as f64),
            v => err(format!("`{key}` must be a finite number, got {v}")),
        }
    }

    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let x = self.f64(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            err(format!("`{key}` must be > 0, got {x}"))
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        match self.get(key) {
            Value::Integer(i) if *i >= 0 => Ok(*i as usize),
            v => err(format!("`{key}` must be a nonnegative integer, got {v}")),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let Value::Array(items) = self.get(key) else { return err(format!("`{key}` must be a list")) };
        let out: Option<Vec<f64>> = items
            .iter()
            .map(|v| match v {
                Value::Float(x) if x.is_finite() => Some(*x),
                Value::Integer(i) => Some(*i as f64),
                _ => None,
            })
            .collect();
        match out {
            Some(v) if !v.is_empty() => Ok(v),
            _ => err(format!("`{key}` must be a nonempty list of numbers")),
        }
    }

    /// Resolved values as JSON for the metadata sidecar.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.values).expect("settings serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[KeySpec] = &[
        KeySpec { key: "model.n", default: "50", help: "" },
        KeySpec { key: "model.beta", default: "2.5", help: "" },
        KeySpec { key: "grid.values", default: "[1, 2.0]", help: "" },
    ];

    #[test]
    fn layers_apply_in_order() {
        let file = "[model]\nn = 10\nbeta = 3\n";
        let s = Settings::resolve(SCHEMA, Some(file), &["model.n=12".into()]).unwrap();
        assert_eq!(s.usize("model.n").unwrap(), 12);
        assert_eq!(s.f64("model.beta").unwrap(), 3.0);
        assert_eq!(s.f64_list("grid.values").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_and_mistyped_keys_are_rejected() {
        assert!(Settings::resolve(SCHEMA, Some("[model]\nm = 1\n"), &[]).is_err());
        assert!(Settings::resolve(SCHEMA, None, &["model.n=fast".into()]).is_err());
        assert!(Settings::resolve(SCHEMA, None, &["model.n".into()]).is_err());
        assert!(Settings::resolve(SCHEMA, Some("[model\nn = 1"), &[]).is_err());
        assert!(Settings::resolve(SCHEMA, None, &["model.n=-3".into()]).unwrap().usize("model.n").is_err());
    }
}
