//! Canonical report documents: a small JSON model with sorted keys and a
//! fixed decimal formatting at 12 significant digits, so a report re-parsed
//! and re-serialized is byte-identical and certificates diff cleanly.

use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;

/// One node of a report document. Maps keep their keys sorted, which is the
/// canonical order.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Value>),
    Map(BTreeMap<String, Value>),
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}
impl From<Vec<Value>> for Value {
    fn from(v: Vec<Value>) -> Self {
        Value::List(v)
    }
}

/// A top-level report document (a map at the root).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub root: BTreeMap<String, Value>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.root.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.root.get(key)
    }

    /// Serializes to canonical JSON (sorted keys, two-space indent,
    /// 12-significant-digit decimals, trailing newline).
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write_map(&mut out, &self.root, 0);
        out.push('\n');
        out
    }

    /// Parses a document previously produced by [`Document::to_json`] (or
    /// any JSON object); numbers with a fractional or exponent part become
    /// `Num`, others `Int`.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        match convert(parsed)? {
            Value::Map(root) => Ok(Document { root }),
            _ => Err(Error::Parse("report root must be an object".into())),
        }
    }

    /// Flattens the document into `key,value` CSV rows with dotted paths and
    /// zero-based list indices, in canonical key order.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        for (k, v) in &self.root {
            flatten_csv(k, v, &mut rows);
        }
        let mut out = String::from("key,value\n");
        for (k, v) in rows {
            out.push_str(&k);
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

fn convert(v: serde_json::Value) -> Result<Value> {
    Ok(match v {
        serde_json::Value::Null => {
            return Err(Error::Parse("null is not used in reports".into()));
        }
        serde_json::Value::Bool(b) => Value::Bool(b),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                // Distinguish 2 from 2.0: serde_json keeps integer-typed
                // numbers as i64 only when they had no '.' or exponent.
                Value::Int(i)
            } else {
                Value::Num(n.as_f64().ok_or_else(|| {
                    Error::Parse(format!("number {n} does not fit in f64"))
                })?)
            }
        }
        serde_json::Value::String(s) => Value::Str(s),
        serde_json::Value::Array(items) => {
            Value::List(items.into_iter().map(convert).collect::<Result<_>>()?)
        }
        serde_json::Value::Object(map) => {
            let mut out = BTreeMap::new();
            for (k, v) in map {
                out.insert(k, convert(v)?);
            }
            Value::Map(out)
        }
    })
}

/// Formats a finite f64 with 12 significant digits, trailing zeros trimmed.
/// Values with decimal exponent in [-4, 15] are written positionally, the
/// rest in exponent notation. Idempotent under parse-and-reformat.
pub fn format_g12(x: f64) -> String {
    assert!(x.is_finite(), "reports only carry finite numbers");
    if x == 0.0 {
        return "0".to_string();
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exponent) = formatted.split_once('e').expect("exponent format");
    let exp: i32 = exponent.parse().expect("numeric exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let k = digits.len() as i32;

    let body = if exp >= k - 1 && exp <= 15 {
        // Integer: pad with zeros.
        let mut s = digits.to_string();
        s.push_str(&"0".repeat((exp - k + 1) as usize));
        s
    } else if exp >= 0 && exp < k - 1 {
        let split = (exp + 1) as usize;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else if (-4..0).contains(&exp) {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if k == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) => out.push_str(&i.to_string()),
        Value::Num(x) => out.push_str(&format_g12(*x)),
        Value::Str(s) => write_escaped(out, s),
        Value::List(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Map(map) => write_map(out, map, indent),
    }
}

fn write_map(out: &mut String, map: &BTreeMap<String, Value>, indent: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push('{');
    for (i, (k, v)) in map.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('\n');
        out.push_str(&"  ".repeat(indent + 1));
        write_escaped(out, k);
        out.push_str(": ");
        write_value(out, v, indent + 1);
    }
    out.push('\n');
    out.push_str(&"  ".repeat(indent));
    out.push('}');
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(i) => i.to_string(),
        Value::Num(x) => format_g12(*x),
        Value::Str(s) => format!("\"{}\"", s.replace('"', "\"\"")),
        _ => unreachable!("containers are flattened"),
    }
}

fn flatten_csv(path: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::List(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten_csv(&format!("{path}.{i}"), item, rows);
            }
        }
        Value::Map(map) => {
            for (k, item) in map {
                flatten_csv(&format!("{path}.{k}"), item, rows);
            }
        }
        scalar => rows.push((path.to_string(), csv_scalar(scalar))),
    }
}
