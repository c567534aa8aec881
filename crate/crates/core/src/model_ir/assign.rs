use std::collections::HashMap;

use super::build::label;
use super::Model;
use crate::error::{Error, Result};
use crate::geometry::{dist, Point};
use crate::instance::Instance;
use crate::solution::Solution;

/// Maps a routing solution onto a full assignment of the model variables.
///
/// Stages beyond the solution's last one collapse onto its last retrieve
/// point; unvisited edges get `rho = lambda = 0`. Distance variables are set
/// to the Euclidean distances, mothership legs to the solution's path
/// lengths.
pub fn assign_solution(model: &Model, inst: &Instance, sol: &Solution) -> Result<Vec<f64>> {
    let n_g = inst.graphs.len();
    let n_t = n_g;
    let n_d = inst.n_drones;
    if sol.stages.len() > n_t {
        return Err(Error::InvalidSkeleton(format!("{} stages exceed the model's {}", sol.stages.len(), n_t)));
    }
    let mut val: HashMap<String, f64> = HashMap::new();
    let mut set = |name: String, x: f64| {
        val.insert(name, x);
    };
    let set_point = |set: &mut dyn FnMut(String, f64), name: String, p: Point| {
        set(format!("{name}_x"), p.x);
        set(format!("{name}_y"), p.y);
    };

    // mothership
    let last_retrieve = sol.stages.last().map(|s| s.retrieve).unwrap_or(sol.origin);
    let stage_at = |t: usize| sol.stages.get(t - 1).map(|s| (s.launch, s.retrieve)).unwrap_or((last_retrieve, last_retrieve));
    let xl: Vec<Point> =
        (0..=n_t + 1).map(|t| if t == 0 { sol.origin } else if t == n_t + 1 { sol.destination } else { stage_at(t).0 }).collect();
    let xr: Vec<Point> =
        (0..=n_t + 1).map(|t| if t == 0 { sol.origin } else if t == n_t + 1 { sol.destination } else { stage_at(t).1 }).collect();
    for t in 0..=n_t + 1 {
        set_point(&mut set, label("xL", &[('t', t)]), xl[t]);
        set_point(&mut set, label("xR", &[('t', t)]), xr[t]);
    }
    for t in 0..=n_t {
        let leg = if t < sol.stages.len() {
            sol.stages[t].inbound
        } else if t == n_t {
            sol.closing
        } else {
            0.0
        };
        set(label("dRL", &[('t', t)]), leg);
    }
    for t in 1..=n_t {
        set(label("dLR", &[('t', t)]), sol.stages.get(t - 1).map_or(0.0, |s| s.service));
    }

    // edges
    let mut order: Vec<Vec<Option<usize>>> = inst.graphs.iter().map(|g| vec![None; g.edges.len()]).collect();
    let mut rpts: Vec<Vec<Point>> = inst.graphs.iter().map(|g| g.edges.iter().map(|e| e.segment.b).collect()).collect();
    let mut lpts = rpts.clone();
    for g in 0..n_g {
        for e in 0..inst.graphs[g].edges.len() {
            let idx = [('g', g), ('e', e)];
            for fam in ["mu", "entry", "s", "rho", "lambda", "numin", "numax", "pmu", "pcov", "dseg"] {
                set(label(fam, &idx), 0.0);
            }
        }
    }
    for op in &sol.operations {
        let g = op.graph;
        if g >= n_g || op.drone >= n_d {
            return Err(Error::InvalidSkeleton(format!("operation on graph {g} out of range")));
        }
        for (k, visit) in op.visits.iter().enumerate() {
            let e = visit.edge;
            let seg = inst.graphs[g].edges[e].segment;
            let idx = [('g', g), ('e', e)];
            let r = seg.point_at_clamped(visit.rho);
            let l = seg.point_at_clamped(visit.lambda);
            rpts[g][e] = r;
            lpts[g][e] = l;
            order[g][e] = Some(k);
            let diff = visit.rho - visit.lambda;
            set(label("mu", &idx), 1.0);
            set(label("entry", &idx), if visit.forward { 1.0 } else { 0.0 });
            set(label("s", &idx), k as f64);
            set(label("rho", &idx), visit.rho);
            set(label("lambda", &idx), visit.lambda);
            set(label("numax", &idx), diff.max(0.0));
            set(label("numin", &idx), (-diff).max(0.0));
            set(label("pcov", &idx), diff.abs());
            set(label("dseg", &idx), dist(r, l));
            set(label("pmu", &idx), dist(r, l));
        }
    }
    for g in 0..n_g {
        for e in 0..inst.graphs[g].edges.len() {
            set_point(&mut set, label("R", &[('g', g), ('e', e)]), rpts[g][e]);
            set_point(&mut set, label("L", &[('g', g), ('e', e)]), lpts[g][e]);
            for f in 0..inst.graphs[g].edges.len() {
                if f == e {
                    continue;
                }
                let idx = [('g', g), ('e', e), ('f', f)];
                let jump = dist(lpts[g][e], rpts[g][f]);
                let next = matches!((order[g][e], order[g][f]), (Some(a), Some(b)) if b == a + 1);
                set(label("z", &idx), if next { 1.0 } else { 0.0 });
                set(label("dpair", &idx), jump);
                set(label("ppair", &idx), if next { jump } else { 0.0 });
            }
            for t in 1..=n_t {
                for d in 1..=n_d {
                    let idx = [('g', g), ('e', e), ('t', t), ('d', d)];
                    let first = order[g][e] == Some(0);
                    let last = order[g][e].is_some_and(|k| {
                        sol.operations.iter().any(|op| op.graph == g && op.visits.len() == k + 1)
                    });
                    let op = sol.operations.iter().find(|op| op.graph == g && op.drone + 1 == d);
                    let is_u = first && op.is_some_and(|op| op.launch_stage + 1 == t);
                    let is_v = last && op.is_some_and(|op| op.retrieve_stage + 1 == t);
                    let dl = dist(xl[t], rpts[g][e]);
                    let dr = dist(lpts[g][e], xr[t]);
                    set(label("u", &idx), if is_u { 1.0 } else { 0.0 });
                    set(label("v", &idx), if is_v { 1.0 } else { 0.0 });
                    set(label("dL", &idx), dl);
                    set(label("dR", &idx), dr);
                    set(label("pL", &idx), if is_u { dl } else { 0.0 });
                    set(label("pR", &idx), if is_v { dr } else { 0.0 });
                }
            }
        }
    }

    // stage counters
    let mut launched_before = 0usize;
    for t in 1..=n_t {
        let k = sol.operations.iter().filter(|op| op.launch_stage + 1 == t).count();
        set(label("beta", &[('t', t)]), if launched_before == n_g { 1.0 } else { 0.0 });
        set(label("k", &[('t', t)]), k as f64);
        launched_before += k;
    }

    model
        .variables
        .iter()
        .map(|v| val.get(&v.name).copied().ok_or_else(|| Error::InvalidSkeleton(format!("no value for {}", v.name))))
        .collect()
}
