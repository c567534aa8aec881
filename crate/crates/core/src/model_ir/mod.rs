//! The mixed-integer second-order-cone formulation as an intermediate
//! representation: indexed variables, linear rows and cone rows, ready for
//! LP-format emission.

mod assign;
mod bigm;
mod build;
mod lp;
mod sec;
mod warmstart;

use std::collections::BTreeMap;

pub use assign::assign_solution;
pub use bigm::{big_m_bounds, BigMTable};
pub use build::{build_async_model, build_model, build_sync_model, mccormick_rows, ModelOptions, Subtour};
pub use lp::{emit_lp, parse_lp_census, LpCensus};
pub use sec::{separate_sec, shortest_cycle};
pub use warmstart::{parse_warmstart, warm_start, WARMSTART_HEADER};

use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarMeta {
    /// Structured label, e.g. `u_g0_e1_t1_d1`.
    pub name: String,
    pub family: &'static str,
    pub indices: Vec<usize>,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub tag: &'static str,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    /// Amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs: f64 = self.terms.iter().map(|&(v, c)| c * values[v.0]).sum();
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointRef {
    Var(VarId, VarId),
    Const(Point),
}

impl PointRef {
    fn value(&self, values: &[f64]) -> Point {
        match *self {
            PointRef::Var(x, y) => Point::new(values[x.0], values[y.0]),
            PointRef::Const(p) => p,
        }
    }
}

/// `||a - b|| <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct SocConstraint {
    pub name: String,
    pub tag: &'static str,
    pub a: (VarId, VarId),
    pub b: PointRef,
    pub bound: VarId,
}

impl SocConstraint {
    pub fn violation(&self, values: &[f64]) -> f64 {
        let a = Point::new(values[self.a.0 .0], values[self.a.1 .0]);
        let b = self.b.value(values);
        (crate::geometry::dist(a, b) - values[self.bound.0]).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub options: ModelOptions,
    pub variables: Vec<VarMeta>,
    pub linear: Vec<LinearConstraint>,
    pub soc: Vec<SocConstraint>,
    /// Minimized.
    pub objective: Vec<(VarId, f64)>,
}

/// Per-family counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelStats {
    pub variables: BTreeMap<&'static str, usize>,
    pub linear: BTreeMap<&'static str, usize>,
    pub soc: BTreeMap<&'static str, usize>,
    pub n_variables: usize,
    pub n_linear: usize,
    pub n_soc: usize,
}

impl ModelStats {
    pub fn linear_rows(&self, tag: &str) -> usize {
        self.linear.get(tag).copied().unwrap_or(0)
    }
}

pub fn model_stats(m: &Model) -> ModelStats {
    let mut s = ModelStats { n_variables: m.variables.len(), n_linear: m.linear.len(), n_soc: m.soc.len(), ..Default::default() };
    for v in &m.variables {
        *s.variables.entry(v.family).or_default() += 1;
    }
    for c in &m.linear {
        *s.linear.entry(c.tag).or_default() += 1;
    }
    for c in &m.soc {
        *s.soc.entry(c.tag).or_default() += 1;
    }
    s
}

impl Model {
    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Largest violation of any row, cone or bound (integrality is not checked).
    pub fn max_violation(&self, values: &[f64]) -> (f64, String) {
        let mut worst = (0.0, String::new());
        let mut see = |r: f64, name: &str| {
            if r > worst.0 {
                worst = (r, name.to_string());
            }
        };
        for c in &self.linear {
            see(c.violation(values), &c.name);
        }
        for c in &self.soc {
            see(c.violation(values), &c.name);
        }
        for (i, v) in self.variables.iter().enumerate() {
            see((v.lower - values[i]).max(values[i] - v.upper).max(0.0), &v.name);
        }
        worst
    }
}
