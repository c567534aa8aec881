//! Independent feasibility checking of solutions.
//!
//! Every quantity is recomputed from the raw points of the solution and the
//! instance geometry. Nothing here depends on the model builder or the
//! solvers.

mod reducible;

use std::fmt::{self, Write};

pub use reducible::{check_sync_reducible, reducibility_residuals, ReducibilityInput};

use crate::geometry::dist;
use crate::instance::{Instance, VisitMode};
use crate::solution::{Mode, Operation, Solution};
use crate::textfmt::num;

pub const REPORT_HEADER: &str = "ammdrpg-report v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Assignment,
    Subtour,
    Coverage,
    Distances,
    Dcw,
    Capacity,
    Boundary,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Assignment,
        Family::Subtour,
        Family::Coverage,
        Family::Distances,
        Family::Dcw,
        Family::Capacity,
        Family::Boundary,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Assignment => "assignment",
            Family::Subtour => "subtour",
            Family::Coverage => "coverage",
            Family::Distances => "distances",
            Family::Dcw => "dcw",
            Family::Capacity => "capacity",
            Family::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub family: Family,
    pub location: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub mode: Mode,
    pub tol: f64,
    /// Maximum residual per family, in [`Family::ALL`] order. Zero means satisfied with slack.
    pub residuals: [f64; 7],
    /// Drone-time residual measured against the following leg instead of
    /// the launch-to-retrieve leg; diagnostic only.
    pub dcw_following_leg: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| *r <= self.tol)
    }

    pub fn residual(&self, f: Family) -> f64 {
        self.residuals[f as usize]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn violations_of(&self, f: Family) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.family == f)
    }

    /// Plain-text table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:<12} {:>14}  status", "family", "max residual").unwrap();
        for f in Family::ALL {
            let r = self.residual(f);
            writeln!(s, "{:<12} {:>14.6e}  {}", f.as_str(), r, if r <= self.tol { "ok" } else { "FAIL" }).unwrap();
        }
        writeln!(s, "{:<12} {:>14.6e}  (diagnostic)", "dcw-follow", self.dcw_following_leg).unwrap();
        writeln!(s, "verdict: {} at tol {:e} ({} mode)", if self.passed() { "PASS" } else { "FAIL" }, self.tol, self.mode.as_str())
            .unwrap();
        for v in &self.violations {
            writeln!(s, "  {} {}: {:.6e}", v.family.as_str(), v.location, v.residual).unwrap();
        }
        s
    }

    /// Machine-readable document with the same header/body layout as instances.
    pub fn to_document(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{REPORT_HEADER}").unwrap();
        writeln!(s, "mode = \"{}\"", self.mode.as_str()).unwrap();
        writeln!(s, "tol = {}", num(self.tol)).unwrap();
        writeln!(s, "verdict = \"{}\"", if self.passed() { "pass" } else { "fail" }).unwrap();
        writeln!(s, "dcw_following_leg = {}", num(self.dcw_following_leg)).unwrap();
        writeln!(s, "\n[residuals]").unwrap();
        for f in Family::ALL {
            writeln!(s, "{} = {}", f.as_str(), num(self.residual(f))).unwrap();
        }
        for v in &self.violations {
            writeln!(s, "\n[[violation]]").unwrap();
            writeln!(s, "family = \"{}\"", v.family.as_str()).unwrap();
            writeln!(s, "location = \"{}\"", v.location).unwrap();
            writeln!(s, "residual = {}", num(v.residual)).unwrap();
        }
        s
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub tol: f64,
    pub mode: Mode,
    pub literal_cap: bool,
}

struct Collector {
    tol: f64,
    residuals: [f64; 7],
    violations: Vec<Violation>,
}

impl Collector {
    fn record(&mut self, family: Family, residual: f64, location: impl FnOnce() -> String) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual.max(0.0) };
        let slot = &mut self.residuals[family as usize];
        *slot = slot.max(r);
        if r > self.tol {
            self.violations.push(Violation { family, location: location(), residual: r });
        }
    }
}

/// Checks `sol` in its own mode.
pub fn check_solution(inst: &Instance, sol: &Solution, tol: f64) -> ValidationReport {
    check_solution_with(inst, sol, &CheckOptions { tol, mode: sol.mode, literal_cap: false })
}

/// Checks `sol` in the given mode (a sync solution may be checked as async).
pub fn check_solution_in(inst: &Instance, sol: &Solution, mode: Mode, tol: f64) -> ValidationReport {
    check_solution_with(inst, sol, &CheckOptions { tol, mode, literal_cap: false })
}

/// Total drone flight length of an operation, recomputed from its points.
/// `None` when the operation references edges that do not exist.
pub fn drone_length(inst: &Instance, sol: &Solution, op: &Operation) -> Option<f64> {
    let g = inst.graphs.get(op.graph)?;
    let start = sol.stages.get(op.launch_stage)?.launch;
    let end = sol.stages.get(op.retrieve_stage)?.retrieve;
    let mut pos = start;
    let mut total = 0.0;
    for v in &op.visits {
        let seg = g.edges.get(v.edge)?.segment;
        let enter = seg.point_at_clamped(v.rho);
        let leave = seg.point_at_clamped(v.lambda);
        total += dist(pos, enter) + dist(enter, leave);
        pos = leave;
    }
    Some(total + dist(pos, end))
}

pub fn check_solution_with(inst: &Instance, sol: &Solution, opts: &CheckOptions) -> ValidationReport {
    let mut c = Collector { tol: opts.tol, residuals: [0.0; 7], violations: Vec::new() };
    let n_stages = sol.stages.len();

    // boundary
    c.record(Family::Boundary, dist(sol.origin, inst.origin), || "origin".into());
    c.record(Family::Boundary, dist(sol.destination, inst.destination), || "destination".into());

    // assignment
    let mut count = vec![0usize; inst.graphs.len()];
    let mut valid_ops = Vec::new();
    for (i, op) in sol.operations.iter().enumerate() {
        let loc = || format!("operation {i}");
        if op.graph >= inst.graphs.len() {
            c.record(Family::Assignment, 1.0, loc);
            continue;
        }
        count[op.graph] += 1;
        if op.drone >= inst.n_drones {
            c.record(Family::Assignment, 1.0, loc);
        }
        if op.launch_stage >= n_stages || op.retrieve_stage >= n_stages {
            c.record(Family::Assignment, 1.0, loc);
            continue;
        }
        let bad_order = match opts.mode {
            Mode::Sync => op.launch_stage != op.retrieve_stage,
            Mode::Async => op.launch_stage > op.retrieve_stage,
        };
        if bad_order {
            c.record(Family::Assignment, 1.0, loc);
        }
        valid_ops.push(i);
    }
    for (g, &k) in count.iter().enumerate() {
        if k != 1 {
            c.record(Family::Assignment, 1.0, || format!("graph {} visited {k} times", inst.graphs[g].id));
        }
    }
    for (ai, &i) in valid_ops.iter().enumerate() {
        for &j in &valid_ops[ai + 1..] {
            let (a, b) = (&sol.operations[i], &sol.operations[j]);
            if a.drone != b.drone {
                continue;
            }
            let clash = a.launch_stage == b.launch_stage
                || a.retrieve_stage == b.retrieve_stage
                || !(a.retrieve_stage < b.launch_stage || b.retrieve_stage < a.launch_stage);
            if clash {
                c.record(Family::Assignment, 1.0, || format!("operations {i} and {j} share drone {}", a.drone));
            }
        }
    }

    // subtour and coverage
    let mut op_ok = vec![false; sol.operations.len()];
    for &i in &valid_ops {
        let op = &sol.operations[i];
        let g = &inst.graphs[op.graph];
        let mut ok = !op.visits.is_empty();
        for (k, v) in op.visits.iter().enumerate() {
            if v.edge >= g.edges.len() || op.visits[..k].iter().any(|w| w.edge == v.edge) {
                ok = false;
            }
        }
        if !ok {
            c.record(Family::Subtour, 1.0, || format!("operation {i} edge order"));
            continue;
        }
        op_ok[i] = true;
        let mut covered = 0.0;
        for v in &op.visits {
            let loc = || format!("graph {} edge {}", g.id, v.edge);
            let e = &g.edges[v.edge];
            let box_res = [-v.rho, v.rho - 1.0, -v.lambda, v.lambda - 1.0].into_iter().fold(f64::NEG_INFINITY, f64::max);
            c.record(Family::Coverage, box_res, loc);
            let dir_res = if v.forward { v.rho - v.lambda } else { v.lambda - v.rho };
            c.record(Family::Coverage, dir_res, loc);
            let frac = (v.lambda - v.rho).abs();
            if inst.visit_mode == VisitMode::PerEdge {
                c.record(Family::Coverage, e.alpha - frac, loc);
            }
            covered += frac * e.length();
        }
        match inst.visit_mode {
            VisitMode::PerEdge => {
                for e in &g.edges {
                    if e.alpha > 0.0 && !op.visits.iter().any(|v| v.edge == e.id) {
                        c.record(Family::Coverage, e.alpha, || format!("graph {} edge {} not visited", g.id, e.id));
                    }
                }
            }
            VisitMode::WholeGraph => {
                c.record(Family::Coverage, g.alpha * g.total_length() - covered, || format!("graph {}", g.id));
            }
        }
    }

    // distances
    let mut prev = sol.origin;
    for (t, st) in sol.stages.iter().enumerate() {
        let finite = st.launch.is_finite() && st.retrieve.is_finite() && st.inbound.is_finite() && st.service.is_finite();
        if !finite {
            c.record(Family::Distances, f64::INFINITY, || format!("stage {t} not finite"));
        }
        c.record(Family::Distances, dist(prev, st.launch) - st.inbound, || format!("stage {t} inbound"));
        c.record(Family::Distances, dist(st.launch, st.retrieve) - st.service, || format!("stage {t} service"));
        prev = st.retrieve;
    }
    c.record(Family::Distances, dist(prev, sol.destination) - sol.closing, || "closing".into());
    let total = sol.path_length();
    c.record(Family::Distances, (sol.objective - total).abs() / (1.0 + total.abs()), || "objective".into());

    // drone timing and capacity
    let cap = if opts.literal_cap { inst.endurance } else { inst.v_m * inst.endurance };
    for (t, st) in sol.stages.iter().enumerate() {
        c.record(Family::Capacity, st.service - cap, || format!("stage {t}"));
    }
    let mut follow = 0.0f64;
    for (i, op) in sol.operations.iter().enumerate() {
        if !op_ok[i] {
            continue;
        }
        let Some(len) = drone_length(inst, sol, op) else { continue };
        let time = len / inst.v_d;
        c.record(Family::Capacity, time - inst.endurance, || format!("operation {i} endurance"));
        let (t1, t2) = (op.launch_stage, op.retrieve_stage);
        let mut window = 0.0;
        for t in t1..=t2 {
            window += sol.stages[t].service;
            if t > t1 {
                window += sol.stages[t].inbound;
            }
        }
        c.record(Family::Dcw, time - window / inst.v_m, || format!("operation {i} (graph {})", inst.graphs[op.graph].id));
        let next = sol.stages.get(t2 + 1).map_or(sol.closing, |s| s.inbound);
        follow = follow.max(time - next / inst.v_m);
    }

    ValidationReport {
        mode: opts.mode,
        tol: opts.tol,
        residuals: c.residuals,
        dcw_following_leg: follow.max(0.0),
        violations: c.violations,
    }
}
