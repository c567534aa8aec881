//! The continuous subproblem left once every combinatorial decision is fixed.
//!
//! With graph-to-stage/drone assignments, edge orders and traversal
//! directions fixed, the remaining problem in the launch/retrieve points and
//! the entry/exit parameters is a second-order-cone program: every distance
//! is a variable bounded below by a norm, coverage and direction rows are
//! linear, and drone/mothership timing couples the distance variables
//! linearly. It is solved by the log-barrier method in [`barrier`].

pub mod barrier;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::instance::{Instance, VisitMode};
use crate::solution::{EdgeVisit, Mode, Operation, Solution, Stage};
use crate::validate::{check_solution_with, CheckOptions, ValidationReport};
use barrier::{Affine, Constraint, Outcome, Program, Settings};

/// The fixed mission of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphVisit {
    /// Index into `Instance::graphs`.
    pub graph: usize,
    pub drone: usize,
    pub launch_stage: usize,
    pub retrieve_stage: usize,
    /// Visited edges in order; the first is the entry edge.
    pub edges: Vec<usize>,
    /// Traversal direction per visited edge (`true`: `from` towards `to`).
    pub forward: Vec<bool>,
}

/// Every binary decision of the model: who visits which graph when, which
/// edges in which order and direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedCombinatorics {
    pub n_stages: usize,
    pub visits: Vec<GraphVisit>,
}

impl FixedCombinatorics {
    pub fn visit_of(&self, graph: usize) -> Option<&GraphVisit> {
        self.visits.iter().find(|v| v.graph == graph)
    }

    /// Launch indicator for edge `e` of graph `g` at stage `t` by drone `d`.
    pub fn u(&self, g: usize, e: usize, t: usize, d: usize) -> bool {
        self.visit_of(g).is_some_and(|v| v.launch_stage == t && v.drone == d && v.edges.first() == Some(&e))
    }

    /// Retrieve indicator for edge `e` of graph `g` at stage `t` by drone `d`.
    pub fn v(&self, g: usize, e: usize, t: usize, d: usize) -> bool {
        self.visit_of(g).is_some_and(|v| v.retrieve_stage == t && v.drone == d && v.edges.last() == Some(&e))
    }

    /// Whether edge `e2` is visited right after `e1`.
    pub fn z(&self, g: usize, e1: usize, e2: usize) -> bool {
        self.visit_of(g).is_some_and(|v| v.edges.windows(2).any(|w| w[0] == e1 && w[1] == e2))
    }

    pub fn mu(&self, g: usize, e: usize) -> bool {
        self.visit_of(g).is_some_and(|v| v.edges.contains(&e))
    }

    /// Direction indicator: `true` for a forward traversal of a visited edge.
    pub fn entry(&self, g: usize, e: usize) -> bool {
        self.visit_of(g)
            .and_then(|v| v.edges.iter().position(|&x| x == e).map(|k| v.forward[k]))
            .unwrap_or(false)
    }

    /// Checks the structural rules: each graph visited exactly once by a
    /// valid drone, at most one launch and one retrieve per stage and
    /// drone, non-overlapping drone missions, and (in sync mode) launch and
    /// retrieve in the same stage.
    pub fn check(&self, inst: &Instance, mode: Mode) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidSkeleton(m));
        let mut seen = vec![false; inst.graphs.len()];
        for v in &self.visits {
            if v.graph >= inst.graphs.len() {
                return fail(format!("graph index {} out of range", v.graph));
            }
            if std::mem::replace(&mut seen[v.graph], true) {
                return fail(format!("graph {} visited twice", v.graph));
            }
            if v.drone >= inst.n_drones {
                return fail(format!("drone {} out of range", v.drone));
            }
            if v.launch_stage >= self.n_stages || v.retrieve_stage >= self.n_stages {
                return fail(format!("stage out of range for graph {}", v.graph));
            }
            match mode {
                Mode::Sync if v.launch_stage != v.retrieve_stage => {
                    return fail(format!("graph {} spans stages in sync mode", v.graph))
                }
                Mode::Async if v.launch_stage > v.retrieve_stage => {
                    return fail(format!("graph {} retrieved before launch", v.graph))
                }
                _ => {}
            }
            let g = &inst.graphs[v.graph];
            if v.edges.is_empty() || v.edges.len() != v.forward.len() {
                return fail(format!("graph {} has an empty or malformed edge order", v.graph));
            }
            for (k, &e) in v.edges.iter().enumerate() {
                if e >= g.edges.len() || v.edges[..k].contains(&e) {
                    return fail(format!("graph {} has an invalid edge order", v.graph));
                }
            }
        }
        if let Some(g) = seen.iter().position(|s| !s) {
            return fail(format!("graph {g} not visited"));
        }
        for (i, a) in self.visits.iter().enumerate() {
            for b in &self.visits[i + 1..] {
                if a.drone != b.drone {
                    continue;
                }
                if a.launch_stage == b.launch_stage || a.retrieve_stage == b.retrieve_stage {
                    return fail(format!("drone {} used twice in one stage", a.drone));
                }
                if !(a.retrieve_stage < b.launch_stage || b.retrieve_stage < a.launch_stage) {
                    return fail(format!("drone {} missions overlap", a.drone));
                }
            }
        }
        Ok(())
    }
}

/// Starting point for the barrier method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// Points spread along the origin-destination segment, minimal coverage.
    Default,
    /// Uniformly random points in the instance bounding box.
    Random(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub init: Init,
    /// Bound the launch-to-retrieve distance by the endurance itself rather
    /// than by the distance the mothership covers within the endurance.
    pub literal_cap: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-6, init: Init::Default, literal_cap: false }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuousSolution {
    /// Stages without any launch or retrieve are dropped.
    pub solution: Solution,
    pub launch_points: Vec<Point>,
    pub retrieve_points: Vec<Point>,
    pub objective: f64,
    /// Certified bound on the distance to the subproblem optimum.
    pub gap: f64,
    pub residuals: ValidationReport,
    pub newton_steps: usize,
    /// Barrier merit change per accepted Newton step (all non-positive).
    pub merit_steps: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Param {
    Var(usize),
    Fixed(f64),
}

impl Param {
    fn affine(self) -> Affine {
        match self {
            Param::Var(i) => Affine::var(i),
            Param::Fixed(c) => Affine::constant(c),
        }
    }

    fn value(self, x: &[f64]) -> f64 {
        match self {
            Param::Var(i) => x[i],
            Param::Fixed(c) => c,
        }
    }
}

type APoint = [Affine; 2];

fn apoint_var(i: usize) -> APoint {
    [Affine::var(i), Affine::var(i + 1)]
}

fn apoint_const(p: Point) -> APoint {
    [Affine::constant(p.x), Affine::constant(p.y)]
}

/// `b + t (c - b)` for an affine parameter `t`.
fn apoint_on(b: Point, c: Point, t: &Affine) -> APoint {
    [t.clone().scaled(c.x - b.x).plus_const(b.x), t.clone().scaled(c.y - b.y).plus_const(b.y)]
}

struct Builder {
    x0: Vec<f64>,
    cons: Vec<Constraint>,
}

impl Builder {
    fn var(&mut self, init: f64) -> usize {
        self.x0.push(init);
        self.x0.len() - 1
    }

    fn point_var(&mut self, p: Point) -> usize {
        let i = self.var(p.x);
        self.var(p.y);
        i
    }

    fn le(&mut self, a: Affine) {
        self.cons.push(Constraint::Affine(a));
    }

    /// `||a - b|| <= w` with `w` a new variable; returns its index.
    fn dist_var(&mut self, a: &APoint, b: &APoint) -> usize {
        let w = self.var(0.0);
        let u = a[0].clone().sub(&b[0]);
        let v = a[1].clone().sub(&b[1]);
        self.x0[w] = u.eval(&self.x0).hypot(v.eval(&self.x0)) + 1.0;
        self.cons.push(Constraint::Cone { s: Affine::var(w), u, v });
        w
    }
}

struct OpVars {
    params: Vec<(Param, Param)>,
}

/// Solves the continuous subproblem for a fixed skeleton.
pub fn solve_fixed(inst: &Instance, fixed: &FixedCombinatorics, mode: Mode, opts: &SolveOptions) -> Result<ContinuousSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    fixed.check(inst, mode)?;

    // compact the stage axis
    let mut used: Vec<usize> = fixed.visits.iter().flat_map(|v| [v.launch_stage, v.retrieve_stage]).collect();
    used.sort_unstable();
    used.dedup();
    let stage_index = |t: usize| used.binary_search(&t).unwrap();
    let n_stages = used.len();

    let mut rng = match opts.init {
        Init::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Init::Default => None,
    };
    let bbox = inst.bbox();
    let random_point = |rng: &mut ChaCha8Rng| {
        Point::new(rng.gen_range(bbox.min.x..=bbox.max.x), rng.gen_range(bbox.min.y..=bbox.max.y))
    };

    let mut b = Builder { x0: Vec::new(), cons: Vec::new() };
    let (orig, dest) = (inst.origin, inst.destination);
    let denom = (2 * n_stages + 1) as f64;
    let mut launch = Vec::with_capacity(n_stages);
    let mut retrieve = Vec::with_capacity(n_stages);
    for t in 0..n_stages {
        let (pl, pr) = match rng.as_mut() {
            Some(r) => (random_point(r), random_point(r)),
            None => (orig.lerp(dest, (2 * t + 1) as f64 / denom), orig.lerp(dest, (2 * t + 2) as f64 / denom)),
        };
        launch.push(b.point_var(pl));
        retrieve.push(b.point_var(pr));
    }

    // mothership path
    let mut inbound = Vec::with_capacity(n_stages);
    let mut service = Vec::with_capacity(n_stages);
    let mut prev = apoint_const(orig);
    for t in 0..n_stages {
        let l = apoint_var(launch[t]);
        let r = apoint_var(retrieve[t]);
        inbound.push(b.dist_var(&prev, &l));
        service.push(b.dist_var(&l, &r));
        prev = r;
    }
    let closing = b.dist_var(&prev, &apoint_const(dest));

    let cap = if opts.literal_cap { inst.endurance } else { inst.v_m * inst.endurance };
    for &w in &service {
        b.le(Affine::var(w).plus_const(-cap));
    }

    // drone missions
    let mut ops: Vec<OpVars> = Vec::with_capacity(fixed.visits.len());
    for visit in &fixed.visits {
        let g = &inst.graphs[visit.graph];
        let edges: Vec<_> = visit.edges.iter().map(|&e| &g.edges[e]).collect();
        let full = match inst.visit_mode {
            VisitMode::PerEdge => {
                for (k, e) in inst.graphs[visit.graph].edges.iter().enumerate() {
                    if e.alpha > 0.0 && !visit.edges.contains(&k) {
                        return Err(Error::Infeasible(format!("graph {}: edge {k} must be visited", g.id)));
                    }
                }
                if let Some(e) = edges.iter().find(|e| e.alpha > 1.0) {
                    return Err(Error::Infeasible(format!("graph {}: edge {} requires more than full coverage", g.id, e.id)));
                }
                edges.iter().map(|e| e.alpha >= 1.0 - 1e-12).collect::<Vec<_>>()
            }
            VisitMode::WholeGraph => {
                let need = g.alpha * g.total_length();
                let avail: f64 = edges.iter().map(|e| e.length()).sum();
                if need > avail * (1.0 + 1e-12) + 1e-12 {
                    return Err(Error::Infeasible(format!("graph {}: visited edges too short for the required coverage", g.id)));
                }
                vec![need >= avail * (1.0 - 1e-12); edges.len()]
            }
        };
        let mut params = Vec::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            let fw = visit.forward[k];
            let need = match inst.visit_mode {
                VisitMode::PerEdge => e.alpha,
                VisitMode::WholeGraph => g.alpha,
            };
            let (r0, l0) = if full[k] { (0.0, 1.0) } else { (0.0, need.clamp(0.0, 1.0)) };
            let (r0, l0) = if fw { (r0, l0) } else { (1.0 - r0, 1.0 - l0) };
            if full[k] {
                params.push((Param::Fixed(r0), Param::Fixed(l0)));
                continue;
            }
            let (ri, li) = match rng.as_mut() {
                Some(r) => (b.var(r.gen_range(0.0..=1.0)), b.var(r.gen_range(0.0..=1.0))),
                None => (b.var(r0), b.var(l0)),
            };
            for i in [ri, li] {
                b.le(Affine { terms: vec![(i, -1.0)], constant: 0.0 });
                b.le(Affine::var(i).plus_const(-1.0));
            }
            // direction: forward means lambda >= rho
            let s = if fw { 1.0 } else { -1.0 };
            b.le(Affine { terms: vec![(ri, s), (li, -s)], constant: 0.0 });
            if inst.visit_mode == VisitMode::PerEdge && e.alpha > 0.0 {
                b.le(Affine { terms: vec![(ri, s), (li, -s)], constant: e.alpha });
            }
            params.push((Param::Var(ri), Param::Var(li)));
        }
        // covered length: sum of sign * (lambda - rho) * length
        let mut covered = Affine::default();
        for (k, e) in edges.iter().enumerate() {
            let s = if visit.forward[k] { 1.0 } else { -1.0 };
            covered = covered.add(&params[k].1.affine().sub(&params[k].0.affine()).scaled(s * e.length()));
        }
        if inst.visit_mode == VisitMode::WholeGraph && g.alpha > 0.0 && !full[0] {
            b.le(covered.clone().scaled(-1.0).plus_const(g.alpha * g.total_length()));
        }
        let at = |k: usize, p: Param| apoint_on(edges[k].segment.b, edges[k].segment.c, &p.affine());
        let tl = stage_index(visit.launch_stage);
        let tr = stage_index(visit.retrieve_stage);
        let mut length = covered;
        let w = b.dist_var(&apoint_var(launch[tl]), &at(0, params[0].0));
        length = length.add(&Affine::var(w));
        for k in 0..edges.len() - 1 {
            let w = b.dist_var(&at(k, params[k].1), &at(k + 1, params[k + 1].0));
            length = length.add(&Affine::var(w));
        }
        let last = edges.len() - 1;
        let w = b.dist_var(&at(last, params[last].1), &apoint_var(retrieve[tr]));
        length = length.add(&Affine::var(w));

        // drone time within the mothership's time over the mission window
        let mut window = Affine::default();
        for t in tl..=tr {
            window = window.add(&Affine::var(service[t]));
            if t > tl {
                window = window.add(&Affine::var(inbound[t]));
            }
        }
        b.le(length.clone().scaled(1.0 / inst.v_d).sub(&window.scaled(1.0 / inst.v_m)));
        b.le(length.scaled(1.0 / inst.v_d).plus_const(-inst.endurance));
        ops.push(OpVars { params });
    }

    let mut objective: Vec<(usize, f64)> = inbound.iter().chain(&service).map(|&i| (i, 1.0)).collect();
    objective.push((closing, 1.0));
    let prog = Program { n: b.x0.len(), objective, constraints: b.cons };
    let settings = Settings { gap: 0.01 * opts.tol, feas_tol: 0.1 * opts.tol, ..Settings::default() };
    let report = match barrier::solve(&prog, &b.x0, &settings) {
        Outcome::Optimal(r) => r,
        Outcome::Infeasible { min_violation_lower_bound } => {
            return Err(Error::Infeasible(format!(
                "no continuous placement satisfies the fixed skeleton (violation at least {min_violation_lower_bound:.3e})"
            )))
        }
        Outcome::NonConverged { iterations } => return Err(Error::NonConverged { tol: opts.tol, iterations }),
    };
    let x = &report.x;

    let pt = |i: usize| Point::new(x[i], x[i + 1]);
    let launch_points: Vec<Point> = launch.iter().map(|&i| pt(i)).collect();
    let retrieve_points: Vec<Point> = retrieve.iter().map(|&i| pt(i)).collect();
    let stages: Vec<Stage> = (0..n_stages)
        .map(|t| Stage { launch: launch_points[t], retrieve: retrieve_points[t], inbound: x[inbound[t]], service: x[service[t]] })
        .collect();
    let operations: Vec<Operation> = fixed
        .visits
        .iter()
        .zip(&ops)
        .map(|(v, o)| Operation {
            graph: v.graph,
            drone: v.drone,
            launch_stage: stage_index(v.launch_stage),
            retrieve_stage: stage_index(v.retrieve_stage),
            visits: v
                .edges
                .iter()
                .zip(&v.forward)
                .zip(&o.params)
                .map(|((&edge, &forward), &(r, l))| EdgeVisit {
                    edge,
                    rho: r.value(x).clamp(0.0, 1.0),
                    lambda: l.value(x).clamp(0.0, 1.0),
                    forward,
                })
                .collect(),
        })
        .collect();
    let mut solution = Solution {
        mode,
        origin: orig,
        destination: dest,
        stages,
        closing: x[closing],
        operations,
        objective: 0.0,
    };
    solution.objective = solution.path_length();
    let residuals = check_solution_with(
        inst,
        &solution,
        &CheckOptions { tol: opts.tol, mode, literal_cap: opts.literal_cap },
    );
    Ok(ContinuousSolution {
        objective: solution.objective,
        solution,
        launch_points,
        retrieve_points,
        gap: report.gap,
        residuals,
        newton_steps: report.newton_steps,
        merit_steps: report.merit_steps,
    })
}

/// Validates `sol` against the instance; same contract as [`crate::validate::check_solution`].
pub fn feasibility_report(inst: &Instance, sol: &Solution, tol: f64) -> ValidationReport {
    crate::validate::check_solution(inst, sol, tol)
}
