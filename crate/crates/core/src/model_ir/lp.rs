use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Model, PointRef, VarKind};
use crate::error::{Error, Result};

fn push_term(line: &mut String, coef: f64, name: &str, first: bool) {
    let sign = if coef < 0.0 { "-" } else { "+" };
    let mag = coef.abs();
    if first {
        if coef < 0.0 {
            line.push_str(" -");
        }
    } else {
        write!(line, " {sign}").unwrap();
    }
    if mag == 1.0 {
        write!(line, " {name}").unwrap();
    } else {
        write!(line, " {mag} {name}").unwrap();
    }
}

fn linear_expr(model: &Model, terms: &[(super::VarId, f64)]) -> String {
    let mut s = String::new();
    if terms.is_empty() {
        return " 0".to_string();
    }
    for (i, &(v, c)) in terms.iter().enumerate() {
        push_term(&mut s, c, &model.variables[v.0].name, i == 0);
    }
    s
}

/// Writes the model in CPLEX LP format, one row per line.
///
/// Each cone `||a - b|| <= t` becomes two difference variables
/// `<cone>_dx`, `<cone>_dy` pinned by linear rows `<cone>_x`, `<cone>_y` and
/// the quadratic row `[ dx ^ 2 + dy ^ 2 - t ^ 2 ] <= 0`, the form solvers
/// recognize as a second-order cone. Output is a pure function of the model.
pub fn emit_lp(model: &Model) -> String {
    let o = &model.options;
    let mut s = String::new();
    writeln!(
        s,
        "\\ ammdrpg model: mode {}, subtour {}, valid inequalities {}",
        o.mode.as_str(),
        o.subtour.as_str(),
        o.valid_inequalities
    )
    .unwrap();
    writeln!(s, "Minimize").unwrap();
    writeln!(s, " obj:{}", linear_expr(model, &model.objective)).unwrap();
    writeln!(s, "Subject To").unwrap();
    for c in &model.linear {
        writeln!(s, " {}:{} {} {}", c.name, linear_expr(model, &c.terms), c.sense.as_str(), c.rhs).unwrap();
    }
    let mut aux = Vec::new();
    for c in &model.soc {
        let names = [model.variables[c.a.0 .0].name.as_str(), model.variables[c.a.1 .0].name.as_str()];
        let (dx, dy) = (format!("{}_dx", c.name), format!("{}_dy", c.name));
        for (k, (axis, d)) in ['x', 'y'].into_iter().zip([&dx, &dy]).enumerate() {
            let mut line = format!(" {}_{axis}: {d} - {}", c.name, names[k]);
            let rhs = match c.b {
                PointRef::Var(bx, by) => {
                    let b = if k == 0 { bx } else { by };
                    write!(line, " + {}", model.variables[b.0].name).unwrap();
                    0.0
                }
                PointRef::Const(p) => -(if k == 0 { p.x } else { p.y }),
            };
            writeln!(s, "{line} = {rhs}").unwrap();
        }
        let t = &model.variables[c.bound.0].name;
        writeln!(s, " {}: [ {dx} ^ 2 + {dy} ^ 2 - {t} ^ 2 ] <= 0", c.name).unwrap();
        aux.push(dx);
        aux.push(dy);
    }
    writeln!(s, "Bounds").unwrap();
    for v in &model.variables {
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => writeln!(s, " {} free", v.name).unwrap(),
            (true, true) => writeln!(s, " {} <= {} <= {}", v.lower, v.name, v.upper).unwrap(),
            (true, false) if v.lower != 0.0 => writeln!(s, " {} >= {}", v.name, v.lower).unwrap(),
            (true, false) => {}
            (false, true) => writeln!(s, " -inf <= {} <= {}", v.name, v.upper).unwrap(),
        }
    }
    for a in &aux {
        writeln!(s, " {a} free").unwrap();
    }
    let of_kind = |k: VarKind| model.variables.iter().filter(move |v| v.kind == k).map(|v| v.name.as_str());
    writeln!(s, "Binaries").unwrap();
    for n in of_kind(VarKind::Binary) {
        writeln!(s, " {n}").unwrap();
    }
    writeln!(s, "Generals").unwrap();
    for n in of_kind(VarKind::Integer) {
        writeln!(s, " {n}").unwrap();
    }
    writeln!(s, "End").unwrap();
    s
}

/// Counts read back from LP text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LpCensus {
    /// Distinct variable names, auxiliary cone variables included.
    pub variables: usize,
    pub linear_rows: usize,
    pub quadratic_rows: usize,
    pub binaries: usize,
    pub generals: usize,
    pub objective_terms: usize,
}

fn is_name(tok: &str) -> bool {
    tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && !matches!(tok, "free" | "inf" | "infinity" | "Inf" | "Infinity")
}

/// Parses LP text as written by [`emit_lp`] and counts its contents.
pub fn parse_lp_census(text: &str) -> Result<LpCensus> {
    #[derive(PartialEq)]
    enum Sec {
        None,
        Obj,
        Rows,
        Bounds,
        Bin,
        Gen,
        Done,
    }
    let mut sec = Sec::None;
    let mut c = LpCensus::default();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let collect = |body: &str, names: &mut BTreeSet<String>| -> usize {
        let mut n = 0;
        for tok in body.split_whitespace() {
            if is_name(tok) {
                names.insert(tok.to_string());
                n += 1;
            }
        }
        n
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let next = match line {
            "Minimize" => Some(Sec::Obj),
            "Subject To" => Some(Sec::Rows),
            "Bounds" => Some(Sec::Bounds),
            "Binaries" => Some(Sec::Bin),
            "Generals" => Some(Sec::Gen),
            "End" => Some(Sec::Done),
            _ => None,
        };
        if let Some(n) = next {
            sec = n;
            continue;
        }
        let body = |line: &str| -> Result<String> {
            line.split_once(':').map(|x| x.1.to_string()).ok_or_else(|| Error::Parse {
                path: format!("line {}", lineno + 1),
                message: "expected `name:`".into(),
            })
        };
        match sec {
            Sec::Obj => c.objective_terms += collect(&body(line)?, &mut names),
            Sec::Rows => {
                let b = body(line)?;
                if b.contains('[') {
                    c.quadratic_rows += 1;
                } else {
                    c.linear_rows += 1;
                }
                collect(&b, &mut names);
            }
            Sec::Bounds => {
                collect(line, &mut names);
            }
            Sec::Bin => {
                c.binaries += collect(line, &mut names);
            }
            Sec::Gen => {
                c.generals += collect(line, &mut names);
            }
            Sec::None | Sec::Done => {
                return Err(Error::Parse { path: format!("line {}", lineno + 1), message: "text outside a section".into() })
            }
        }
    }
    if sec != Sec::Done {
        return Err(Error::Parse { path: "end".into(), message: "missing `End`".into() });
    }
    c.variables = names.len();
    Ok(c)
}
