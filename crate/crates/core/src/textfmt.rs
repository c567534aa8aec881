//! Helpers shared by the versioned text formats: a header line followed by
//! a TOML body. Floats are written with 17 significant digits.

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn point(p: Point) -> String {
    format!("[{}, {}]", num(p.x), num(p.y))
}

/// Splits off and checks the header line, then parses the TOML body.
pub(crate) fn parse_document(text: &str, kind: &str, version: &str) -> Result<Table> {
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    let first = first.trim_end_matches('\r').trim();
    let mut parts = first.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == kind => {
            if v != version {
                return Err(Error::UnknownVersion(v.to_string()));
            }
        }
        _ => {
            return Err(Error::Parse {
                path: "header".into(),
                message: format!("expected `{kind} {version}`, found `{first}`"),
            })
        }
    }
    body.parse::<Table>().map_err(|e| Error::Parse { path: "body".into(), message: e.to_string() })
}

pub(crate) fn missing(path: &str) -> Error {
    Error::Parse { path: path.into(), message: "missing field".into() }
}

pub(crate) fn bad(path: &str, what: &str) -> Error {
    Error::Parse { path: path.into(), message: format!("expected {what}") }
}

pub(crate) fn get<'a>(t: &'a Table, key: &str, path: &str) -> Result<&'a Value> {
    t.get(key).ok_or_else(|| missing(&join(path, key)))
}

pub(crate) fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub(crate) fn as_f64(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(path, "a number")),
    }
}

pub(crate) fn as_usize(v: &Value, path: &str) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(bad(path, "a non-negative integer")),
    }
}

pub(crate) fn as_bool(v: &Value, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| bad(path, "a boolean"))
}

pub(crate) fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(path, "a string"))
}

pub(crate) fn as_table<'a>(v: &'a Value, path: &str) -> Result<&'a Table> {
    v.as_table().ok_or_else(|| bad(path, "a table"))
}

pub(crate) fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "an array"))
}

pub(crate) fn as_point(v: &Value, path: &str) -> Result<Point> {
    let a = as_array(v, path)?;
    if a.len() != 2 {
        return Err(bad(path, "a pair [x, y]"));
    }
    Ok(Point::new(as_f64(&a[0], &format!("{path}[0]"))?, as_f64(&a[1], &format!("{path}[1]"))?))
}

pub(crate) fn get_f64(t: &Table, key: &str, path: &str) -> Result<f64> {
    as_f64(get(t, key, path)?, &join(path, key))
}

pub(crate) fn get_usize(t: &Table, key: &str, path: &str) -> Result<usize> {
    as_usize(get(t, key, path)?, &join(path, key))
}

pub(crate) fn get_point(t: &Table, key: &str, path: &str) -> Result<Point> {
    as_point(get(t, key, path)?, &join(path, key))
}

pub(crate) fn get_table<'a>(t: &'a Table, key: &str, path: &str) -> Result<&'a Table> {
    as_table(get(t, key, path)?, &join(path, key))
}

pub(crate) fn get_array<'a>(t: &'a Table, key: &str, path: &str) -> Result<&'a Vec<Value>> {
    as_array(get(t, key, path)?, &join(path, key))
}
