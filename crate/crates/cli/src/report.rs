//! Report envelope and emission.
//!
//! A report is a pure function of the run configuration and the declared
//! worker count: no timestamps, hostnames, or wall times go into the body,
//! so identical runs produce identical bytes. Timing is printed to stderr
//! by the caller. Floats are rounded to 12 significant digits before
//! serialization; counts stay exact (decimal strings above 2^53).

use serde_json::{Map, Value};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub metrics: Value,
    pub pass: bool,
}

impl Report {
    /// The emitted object. serde_json orders keys alphabetically, which is
    /// part of the byte-stability contract.
    pub fn envelope(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), SCHEMA_VERSION.into());
        m.insert("command".into(), self.command.into());
        m.insert("config".into(), round_floats(self.config.clone()));
        m.insert("metrics".into(), round_floats(self.metrics.clone()));
        m.insert("pass".into(), self.pass.into());
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        let v = self.envelope();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => to_csv(&v),
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> std::io::Result<()> {
        let body = self.render(format);
        match out {
            Some(path) => std::fs::write(path, body),
            None => std::io::stdout().write_all(body.as_bytes()),
        }
    }
}

/// Round every float in the tree to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let f = round_sig(n.as_f64().expect("is_f64"));
                return serde_json::Number::from_f64(f).map(Value::Number).unwrap_or(Value::Null);
            }
            Value::Number(n)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("exponent form roundtrips")
}

/// Two-column key,value CSV over the flattened envelope. Nesting is dotted,
/// array entries are bracketed, and values with CSV metacharacters are
/// quoted.
pub fn to_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut s = String::from("key,value\n");
    for (k, val) in rows {
        s.push_str(&k);
        s.push(',');
        s.push_str(&val);
        s.push('\n');
    }
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::String(s) => out.push((prefix.to_string(), csv_quote(s))),
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_to_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(123456789012345.0), 123456789012000.0);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-2.5e-7), -2.5e-7);
    }

    #[test]
    fn envelope_is_stable() {
        let r = Report {
            command: "demo",
            config: json!({"q": 3}),
            metrics: json!({"x": 1.0 / 3.0, "big": "9007199254740993"}),
            pass: true,
        };
        let a = r.render(Format::Json);
        let b = r.render(Format::Json);
        assert_eq!(a, b);
        assert!(a.contains("0.333333333333"));
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn csv_flattens_nested_values() {
        let r = Report {
            command: "demo",
            config: json!({"q": 3}),
            metrics: json!({"list": [1, 2], "s": "a,b"}),
            pass: false,
        };
        let csv = r.render(Format::Csv);
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("metrics.list[0],1\n"));
        assert!(csv.contains("metrics.list[1],2\n"));
        assert!(csv.contains("metrics.s,\"a,b\"\n"));
        assert!(csv.contains("pass,false\n"));
    }
}
