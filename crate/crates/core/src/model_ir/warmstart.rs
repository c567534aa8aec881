use std::fmt::Write;

use super::{Model, VarId, VarKind};
use crate::error::{Error, Result};

pub const WARMSTART_HEADER: &str = "# ammdrpg-warmstart v1";

/// Writes the integral part of an assignment as `name value` lines, rounded
/// to the nearest integer, in model order.
pub fn warm_start(model: &Model, values: &[f64]) -> String {
    let mut s = format!("{WARMSTART_HEADER}\n");
    for (v, x) in model.variables.iter().zip(values) {
        if v.kind != VarKind::Continuous {
            writeln!(s, "{} {}", v.name, x.round() as i64).unwrap();
        }
    }
    s
}

/// Reads a warm start back against `model`. Unknown names are an error.
pub fn parse_warmstart(model: &Model, text: &str) -> Result<Vec<(VarId, f64)>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(WARMSTART_HEADER) {
        return Err(Error::Parse { path: "header".into(), message: format!("expected `{WARMSTART_HEADER}`") });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let path = format!("line {}", i + 2);
        let (name, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse { path: path.clone(), message: "expected `name value`".into() })?;
        let id = model
            .var_by_name(name)
            .ok_or_else(|| Error::Parse { path: path.clone(), message: format!("unknown variable `{name}`") })?;
        let x: f64 = value.trim().parse().map_err(|_| Error::Parse { path, message: "expected a number".into() })?;
        out.push((id, x));
    }
    Ok(out)
}
