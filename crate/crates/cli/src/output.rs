//! Report serialization: JSON with every float at 17 significant digits, or
//! a flattened single-row CSV.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// Pretty JSON formatter that prints floats as `{:.16e}`.
struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{}", fmt_f64(v))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{}", fmt_f64(v as f64))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // JSON has no non-finite numbers; CSV keeps the Rust spelling
        format!("{v}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Flatten a report into `(column, value)` pairs. Entries of `results` and
/// `stats` are keyed by their `check_id` (plus `@p=` when present); other
/// nesting becomes dotted paths. Per-instance records are left out.
pub fn flatten(report: &Value) -> Vec<(String, String)> {
    let mut cols = Vec::new();
    let Value::Object(top) = report else {
        walk("", report, &mut cols);
        return cols;
    };
    for (key, value) in top {
        match (key.as_str(), value) {
            ("results" | "stats", Value::Array(items)) => {
                let mut seen = std::collections::BTreeMap::<String, usize>::new();
                for item in items {
                    let mut prefix = item.get("check_id").and_then(Value::as_str).unwrap_or(key).to_string();
                    if let Some(p) = item
                        .get("p")
                        .or_else(|| item.pointer("/diagnostics/p"))
                        .and_then(Value::as_f64)
                    {
                        prefix.push_str(&format!("@p={p}"));
                    }
                    let count = seen.entry(prefix.clone()).or_insert(0);
                    *count += 1;
                    if *count > 1 {
                        prefix.push_str(&format!("#{count}"));
                    }
                    if let Value::Object(fields) = item {
                        for (f, v) in fields {
                            if f == "per_instance" || f == "check_id" {
                                continue;
                            }
                            walk(&format!("{prefix}.{f}"), v, &mut cols);
                        }
                    }
                }
            }
            _ => walk(key, value, &mut cols),
        }
    }
    cols
}

fn walk(path: &str, v: &Value, cols: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                walk(&p, x, cols);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(&format!("{path}.{i}"), x, cols);
            }
        }
        _ => cols.push((path.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => fmt_f64(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_csv(report: &Value) -> csv::Result<Vec<u8>> {
    let cols = flatten(report);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(cols.iter().map(|(k, _)| k))?;
    w.write_record(cols.iter().map(|(_, v)| v))?;
    w.into_inner().map_err(|e| e.into_error().into())
}
