//! Flat `key = value` configuration with `[section]` headers.
//!
//! A key `m` under `[grid]` is addressed as `grid.m`; keys before the first
//! header are addressed by their bare name. Every experiment declares its keys
//! up front and anything else is rejected.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Float,
    /// Float `> 0`.
    Positive,
    /// Float `≥ 0`.
    NonNegative,
    /// Integer `≥ 0`.
    Count,
    /// Integer `≥ 1`.
    PositiveCount,
    FloatList,
    CountList,
    Text,
}

#[derive(Clone, Copy, Debug)]
pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` means the key has no default and may be left out only when the
    /// experiment can do without it.
    pub default: Option<&'static str>,
}

pub const fn key(key: &'static str, kind: Kind, default: &'static str) -> KeySpec {
    KeySpec { key, kind, default: Some(default) }
}

pub const fn optional(key: &'static str, kind: Kind) -> KeySpec {
    KeySpec { key, kind, default: None }
}

/// Keys every experiment accepts.
pub const COMMON: &[KeySpec] = &[optional("seed", Kind::Count), key("threads", Kind::PositiveCount, "1")];

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Count(u64),
    FloatList(Vec<f64>),
    CountList(Vec<u64>),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(xs: &[T]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Count(n) => write!(f, "{n}"),
            Value::FloatList(xs) => f.write_str(&join(xs)),
            Value::CountList(xs) => f.write_str(&join(xs)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// Raw entries as written, with their line numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (n, line) in text.lines().enumerate() {
            let lineno = n + 1;
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
                    .ok_or_else(|| RunError::Config(format!("line {lineno}: malformed section header `{line}`")))?;
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| RunError::Config(format!("line {lineno}: expected `key = value`, got `{line}`")))?;
            let k = k.trim();
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(RunError::Config(format!("line {lineno}: invalid key `{k}`")));
            }
            let full = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            let v = unquote(v.trim()).to_string();
            if entries.insert(full.clone(), (v, lineno)).is_some() {
                return Err(RunError::Config(format!("line {lineno}: duplicate key `{full}`")));
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), (value, 0));
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(v)
}

/// A configuration checked against an experiment's key list.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

impl Config {
    pub fn resolve(raw: &RawConfig, specs: &[KeySpec]) -> Result<Self, RunError> {
        let known = |k: &str| specs.iter().chain(COMMON).any(|s| s.key == k);
        let unknown: Vec<String> = raw
            .entries
            .iter()
            .filter(|(k, _)| !known(k))
            .map(|(k, (_, line))| if *line > 0 { format!("`{k}` (line {line})") } else { format!("`{k}`") })
            .collect();
        if !unknown.is_empty() {
            return Err(RunError::Config(format!("unknown key {}", unknown.join(", "))));
        }
        let mut values = BTreeMap::new();
        for spec in specs.iter().chain(COMMON) {
            let text = match raw.entries.get(spec.key) {
                Some((v, _)) => v.as_str(),
                None => match spec.default {
                    Some(d) => d,
                    None => continue,
                },
            };
            let v = parse_value(text, spec.kind).map_err(|e| RunError::Config(format!("key `{}`: {e}", spec.key)))?;
            values.insert(spec.key.to_string(), v);
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn expect(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or_else(|| panic!("key `{key}` read without being declared"))
    }

    pub fn f64(&self, key: &str) -> f64 {
        match self.expect(key) {
            Value::Float(x) => *x,
            Value::Count(n) => *n as f64,
            v => panic!("key `{key}` is not a number: {v:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        match self.expect(key) {
            Value::Count(n) => *n as usize,
            v => panic!("key `{key}` is not a count: {v:?}"),
        }
    }

    pub fn f64s(&self, key: &str) -> Vec<f64> {
        match self.expect(key) {
            Value::FloatList(xs) => xs.clone(),
            v => panic!("key `{key}` is not a list of numbers: {v:?}"),
        }
    }

    pub fn usizes(&self, key: &str) -> Vec<usize> {
        match self.expect(key) {
            Value::CountList(xs) => xs.iter().map(|&n| n as usize).collect(),
            v => panic!("key `{key}` is not a list of counts: {v:?}"),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.values.get("seed") {
            Some(Value::Count(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn threads(&self) -> usize {
        self.usize("threads")
    }

    /// Every resolved key with its canonical value, sorted by key.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.values.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
    }
}

fn parse_value(text: &str, kind: Kind) -> Result<Value, String> {
    let float = |s: &str| -> Result<f64, String> {
        let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    };
    let count = |s: &str| -> Result<u64, String> { s.trim().parse().map_err(|_| format!("`{s}` is not a nonnegative integer")) };
    let list = |s: &str| -> Vec<String> { s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect() };
    match kind {
        Kind::Float => float(text).map(Value::Float),
        Kind::Positive => {
            let x = float(text)?;
            if x > 0.0 {
                Ok(Value::Float(x))
            } else {
                Err(format!("must be > 0, got {x}"))
            }
        }
        Kind::NonNegative => {
            let x = float(text)?;
            if x >= 0.0 {
                Ok(Value::Float(x))
            } else {
                Err(format!("must be ≥ 0, got {x}"))
            }
        }
        Kind::Count => count(text).map(Value::Count),
        Kind::PositiveCount => match count(text)? {
            0 => Err("must be ≥ 1".into()),
            n => Ok(Value::Count(n)),
        },
        Kind::FloatList => {
            let xs = list(text).iter().map(|s| float(s)).collect::<Result<Vec<_>, _>>()?;
            if xs.is_empty() {
                Err("empty list".into())
            } else {
                Ok(Value::FloatList(xs))
            }
        }
        Kind::CountList => {
            let xs = list(text).iter().map(|s| count(s)).collect::<Result<Vec<_>, _>>()?;
            if xs.is_empty() {
                Err("empty list".into())
            } else {
                Ok(Value::CountList(xs))
            }
        }
        Kind::Text => Ok(Value::Text(text.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPECS: &[KeySpec] = &[key("grid.m", Kind::Positive, "1"), key("ks", Kind::CountList, "8,16"), optional("cloud.points", Kind::Text)];

    #[test]
    fn sections_defaults_and_echo() {
        let raw = RawConfig::parse("seed = 7\n# comment\n[grid]\nm = 2.5 # trailing\n[cloud]\npoints = 0,0; 3,0\n").unwrap();
        let c = Config::resolve(&raw, SPECS).unwrap();
        assert_eq!(c.f64("grid.m"), 2.5);
        assert_eq!(c.usizes("ks"), vec![8, 16]);
        assert_eq!(c.seed(), Some(7));
        assert_eq!(c.threads(), 1);
        assert_eq!(c.text("cloud.points"), Some("0,0; 3,0"));
        assert_eq!(c.echo().get("ks").map(String::as_str), Some("8,16"));
    }

    #[test]
    fn unknown_key_is_named() {
        let raw = RawConfig::parse("masss=1\n").unwrap();
        let err = Config::resolve(&raw, SPECS).unwrap_err().to_string();
        assert!(err.contains("masss"), "{err}");
    }

    #[test]
    fn bad_values_and_syntax() {
        let raw = RawConfig::parse("[grid]\nm = -1\n").unwrap();
        assert!(Config::resolve(&raw, SPECS).unwrap_err().to_string().contains("grid.m"));
        assert!(RawConfig::parse("[grid\n").is_err());
        assert!(RawConfig::parse("novalue\n").is_err());
        assert!(RawConfig::parse("a=1\na=2\n").is_err());
    }
}
