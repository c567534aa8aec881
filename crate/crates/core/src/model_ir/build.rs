use std::collections::HashMap;

use super::bigm::big_m_bounds;
use super::{LinearConstraint, Model, PointRef, Sense, SocConstraint, VarId, VarKind, VarMeta};
use crate::instance::{Instance, VisitMode};
use crate::solution::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subtour {
    /// Order variables with Miller-Tucker-Zemlin rows.
    Mtz,
    /// No rows; cuts come from [`super::separate_sec`] during the solve.
    Sec,
}

impl Subtour {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subtour::Mtz => "mtz",
            Subtour::Sec => "sec",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelOptions {
    pub mode: Mode,
    pub subtour: Subtour,
    pub valid_inequalities: bool,
    /// One launch and one retrieve per stage in total instead of per drone.
    pub literal_stage_cap: bool,
    /// Bound the launch-to-retrieve distance by the endurance itself.
    pub literal_cap: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            mode: Mode::Sync,
            subtour: Subtour::Mtz,
            valid_inequalities: false,
            literal_stage_cap: false,
            literal_cap: false,
        }
    }
}

/// The four envelope rows of `p = b * d` for binary `b` and `d` in `[lo, hi]`,
/// each as `(terms over (p, b, d), sense, rhs)`:
/// `p <= hi b`, `p >= lo b`, `p <= d - lo (1 - b)`, `p >= d - hi (1 - b)`.
pub fn mccormick_rows(lo: f64, hi: f64) -> [([f64; 3], Sense, f64); 4] {
    [
        ([1.0, -hi, 0.0], Sense::Le, 0.0),
        ([1.0, -lo, 0.0], Sense::Ge, 0.0),
        ([1.0, -lo, -1.0], Sense::Le, -lo),
        ([1.0, -hi, -1.0], Sense::Ge, -hi),
    ]
}

struct Builder {
    m: Model,
}

pub(super) fn label(family: &str, idx: &[(char, usize)]) -> String {
    let mut s = family.to_string();
    for (c, i) in idx {
        s.push('_');
        s.push(*c);
        s.push_str(&i.to_string());
    }
    s
}

impl Builder {
    fn var(&mut self, family: &'static str, idx: &[(char, usize)], kind: VarKind, lower: f64, upper: f64) -> VarId {
        self.m.variables.push(VarMeta {
            name: label(family, idx),
            family,
            indices: idx.iter().map(|x| x.1).collect(),
            kind,
            lower,
            upper,
        });
        VarId(self.m.variables.len() - 1)
    }

    fn bin(&mut self, family: &'static str, idx: &[(char, usize)]) -> VarId {
        self.var(family, idx, VarKind::Binary, 0.0, 1.0)
    }

    fn point(&mut self, family: &'static str, idx: &[(char, usize)]) -> (VarId, VarId) {
        let x = self.var(family, idx, VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        self.m.variables[x.0].name.push_str("_x");
        let y = self.var(family, idx, VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        self.m.variables[y.0].name.push_str("_y");
        (x, y)
    }

    fn row(&mut self, tag: &'static str, idx: &[(char, usize)], terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) {
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.iter_mut().find(|t| t.0 == v) {
                Some(t) => t.1 += c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        self.m.linear.push(LinearConstraint { name: label(tag, idx), tag, terms: merged, sense, rhs });
    }

    fn soc(&mut self, tag: &'static str, idx: &[(char, usize)], a: (VarId, VarId), b: PointRef, bound: VarId) {
        self.m.soc.push(SocConstraint { name: label(tag, idx), tag, a, b, bound });
    }

    fn mccormick(&mut self, tag: &'static str, idx: &[(char, usize)], p: VarId, b: VarId, d: VarId, lo: f64, hi: f64) {
        for (k, (c, sense, rhs)) in mccormick_rows(lo, hi).into_iter().enumerate() {
            let mut name_idx = idx.to_vec();
            name_idx.push(('k', k + 1));
            self.row(tag, &name_idx, vec![(p, c[0]), (b, c[1]), (d, c[2])], sense, rhs);
        }
    }
}

type Key4 = (usize, usize, usize, usize);

pub fn build_sync_model(inst: &Instance, opts: &ModelOptions) -> Model {
    build_model(inst, &ModelOptions { mode: Mode::Sync, ..*opts })
}

pub fn build_async_model(inst: &Instance, opts: &ModelOptions) -> Model {
    build_model(inst, &ModelOptions { mode: Mode::Async, ..*opts })
}

/// Builds the formulation with `|G|` stages (numbered from 1; stage 0 and
/// `|G| + 1` hold the origin and destination) and drones numbered from 1.
pub fn build_model(inst: &Instance, opts: &ModelOptions) -> Model {
    let n_g = inst.graphs.len();
    let n_t = n_g;
    let n_d = inst.n_drones;
    let stages = 1..=n_t;
    let drones = 1..=n_d;
    let bigm = big_m_bounds(inst);
    let mut b = Builder {
        m: Model { options: *opts, variables: Vec::new(), linear: Vec::new(), soc: Vec::new(), objective: Vec::new() },
    };

    // assignment and routing binaries
    let mut u: HashMap<Key4, VarId> = HashMap::new();
    let mut v: HashMap<Key4, VarId> = HashMap::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    u.insert((g, e, t, d), b.bin("u", &[('g', g), ('e', e), ('t', t), ('d', d)]));
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    v.insert((g, e, t, d), b.bin("v", &[('g', g), ('e', e), ('t', t), ('d', d)]));
                }
            }
        }
    }
    let mut z: HashMap<(usize, usize, usize), VarId> = HashMap::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for f in 0..gr.edges.len() {
                if e != f {
                    z.insert((g, e, f), b.bin("z", &[('g', g), ('e', e), ('f', f)]));
                }
            }
        }
    }
    let per_edge = |b: &mut Builder, family: &'static str, kind: VarKind, lo: f64, hi: f64| -> Vec<Vec<VarId>> {
        inst.graphs
            .iter()
            .enumerate()
            .map(|(g, gr)| (0..gr.edges.len()).map(|e| b.var(family, &[('g', g), ('e', e)], kind, lo, hi)).collect())
            .collect()
    };
    let mu = per_edge(&mut b, "mu", VarKind::Binary, 0.0, 1.0);
    let entry = per_edge(&mut b, "entry", VarKind::Binary, 0.0, 1.0);
    let s_order: Option<Vec<Vec<VarId>>> = match opts.subtour {
        Subtour::Mtz => Some(
            inst.graphs
                .iter()
                .enumerate()
                .map(|(g, gr)| {
                    let top = gr.edges.len() as f64 - 1.0;
                    (0..gr.edges.len()).map(|e| b.var("s", &[('g', g), ('e', e)], VarKind::Continuous, 0.0, top)).collect()
                })
                .collect(),
        ),
        Subtour::Sec => None,
    };
    let rho = per_edge(&mut b, "rho", VarKind::Continuous, 0.0, 1.0);
    let lambda = per_edge(&mut b, "lambda", VarKind::Continuous, 0.0, 1.0);
    let numin = per_edge(&mut b, "numin", VarKind::Continuous, 0.0, 1.0);
    let numax = per_edge(&mut b, "numax", VarKind::Continuous, 0.0, 1.0);
    let mut rpt = Vec::new();
    let mut lpt = Vec::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        rpt.push((0..gr.edges.len()).map(|e| b.point("R", &[('g', g), ('e', e)])).collect::<Vec<_>>());
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        lpt.push((0..gr.edges.len()).map(|e| b.point("L", &[('g', g), ('e', e)])).collect::<Vec<_>>());
    }
    let xl: Vec<(VarId, VarId)> = (0..=n_t + 1).map(|t| b.point("xL", &[('t', t)])).collect();
    let xr: Vec<(VarId, VarId)> = (0..=n_t + 1).map(|t| b.point("xR", &[('t', t)])).collect();

    // distances
    let cont = VarKind::Continuous;
    let inf = f64::INFINITY;
    let mut dl: HashMap<Key4, VarId> = HashMap::new();
    let mut dr: HashMap<Key4, VarId> = HashMap::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    dl.insert((g, e, t, d), b.var("dL", &[('g', g), ('e', e), ('t', t), ('d', d)], cont, 0.0, inf));
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    dr.insert((g, e, t, d), b.var("dR", &[('g', g), ('e', e), ('t', t), ('d', d)], cont, 0.0, inf));
                }
            }
        }
    }
    let dseg = per_edge(&mut b, "dseg", cont, 0.0, inf);
    let mut dpair: HashMap<(usize, usize, usize), VarId> = HashMap::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for f in 0..gr.edges.len() {
                if e != f {
                    dpair.insert((g, e, f), b.var("dpair", &[('g', g), ('e', e), ('f', f)], cont, 0.0, inf));
                }
            }
        }
    }
    let drl: Vec<VarId> = (0..=n_t).map(|t| b.var("dRL", &[('t', t)], cont, 0.0, inf)).collect();
    let dlr: Vec<VarId> = (0..=n_t)
        .map(|t| if t == 0 { VarId(usize::MAX) } else { b.var("dLR", &[('t', t)], cont, 0.0, inf) })
        .collect();

    // product variables
    let mut pl: HashMap<Key4, VarId> = HashMap::new();
    let mut pr: HashMap<Key4, VarId> = HashMap::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    pl.insert((g, e, t, d), b.var("pL", &[('g', g), ('e', e), ('t', t), ('d', d)], cont, 0.0, inf));
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    pr.insert((g, e, t, d), b.var("pR", &[('g', g), ('e', e), ('t', t), ('d', d)], cont, 0.0, inf));
                }
            }
        }
    }
    let mut ppair: HashMap<(usize, usize, usize), VarId> = HashMap::new();
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for f in 0..gr.edges.len() {
                if e != f {
                    ppair.insert((g, e, f), b.var("ppair", &[('g', g), ('e', e), ('f', f)], cont, 0.0, inf));
                }
            }
        }
    }
    let pmu = per_edge(&mut b, "pmu", cont, 0.0, inf);
    let pcov = per_edge(&mut b, "pcov", cont, 0.0, 1.0);

    let (beta, k): (Vec<VarId>, Vec<VarId>) = if opts.valid_inequalities {
        let beta = stages.clone().map(|t| b.bin("beta", &[('t', t)])).collect();
        let k = stages.clone().map(|t| b.var("k", &[('t', t)], VarKind::Integer, 0.0, n_g as f64)).collect();
        (beta, k)
    } else {
        (Vec::new(), Vec::new())
    };

    // objective: every mothership leg
    b.m.objective = drl.iter().map(|&x| (x, 1.0)).chain(dlr[1..].iter().map(|&x| (x, 1.0))).collect();

    let edges_of = |g: usize| 0..inst.graphs[g].edges.len();
    let sum_u = |g: usize, t: usize, d: usize| edges_of(g).map(|e| (u[&(g, e, t, d)], 1.0)).collect::<Vec<_>>();
    let sum_v = |g: usize, t: usize, d: usize| edges_of(g).map(|e| (v[&(g, e, t, d)], 1.0)).collect::<Vec<_>>();

    // (1)-(2): launch and retrieve capacity per stage
    for t in stages.clone() {
        if opts.literal_stage_cap {
            let all_u = (0..n_g).flat_map(|g| drones.clone().flat_map(move |d| sum_u(g, t, d))).collect();
            b.row("StageCapLaunch", &[('t', t)], all_u, Sense::Le, 1.0);
            let all_v = (0..n_g).flat_map(|g| drones.clone().flat_map(move |d| sum_v(g, t, d))).collect();
            b.row("StageCapRetrieve", &[('t', t)], all_v, Sense::Le, 1.0);
        } else {
            for d in drones.clone() {
                let all_u = (0..n_g).flat_map(|g| sum_u(g, t, d)).collect();
                b.row("StageCapLaunch", &[('t', t), ('d', d)], all_u, Sense::Le, 1.0);
                let all_v = (0..n_g).flat_map(|g| sum_v(g, t, d)).collect();
                b.row("StageCapRetrieve", &[('t', t), ('d', d)], all_v, Sense::Le, 1.0);
            }
        }
    }
    // (3)-(4): every graph entered and left once
    for g in 0..n_g {
        let all_u = stages.clone().flat_map(|t| drones.clone().flat_map(move |d| sum_u(g, t, d))).collect();
        b.row("GraphEnter", &[('g', g)], all_u, Sense::Eq, 1.0);
        let all_v = stages.clone().flat_map(|t| drones.clone().flat_map(move |d| sum_v(g, t, d))).collect();
        b.row("GraphExit", &[('g', g)], all_v, Sense::Eq, 1.0);
    }
    // (5) or its cumulative asynchronous form
    for g in 0..n_g {
        for t in stages.clone() {
            for d in drones.clone() {
                match opts.mode {
                    Mode::Sync => {
                        let mut terms = sum_u(g, t, d);
                        terms.extend(sum_v(g, t, d).into_iter().map(|(x, _)| (x, -1.0)));
                        b.row("SameStage", &[('g', g), ('t', t), ('d', d)], terms, Sense::Eq, 0.0);
                    }
                    Mode::Async => {
                        let mut terms = Vec::new();
                        for t2 in 1..=t {
                            terms.extend(sum_u(g, t2, d));
                            terms.extend(sum_v(g, t2, d).into_iter().map(|(x, _)| (x, -1.0)));
                        }
                        let sense = if t == n_t { Sense::Eq } else { Sense::Ge };
                        b.row("LaunchBeforeRetrieve", &[('g', g), ('t', t), ('d', d)], terms, sense, 0.0);
                    }
                }
            }
        }
    }
    // (6)-(7): flow through visited edges
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            let mut terms: Vec<(VarId, f64)> =
                stages.clone().flat_map(|t| drones.clone().map(move |d| (t, d))).map(|(t, d)| (u[&(g, e, t, d)], 1.0)).collect();
            terms.extend(edges_of(g).filter(|&f| f != e).map(|f| (z[&(g, f, e)], 1.0)));
            terms.push((mu[g][e], -1.0));
            b.row("FlowIn", &[('g', g), ('e', e)], terms, Sense::Eq, 0.0);
            let mut terms: Vec<(VarId, f64)> =
                stages.clone().flat_map(|t| drones.clone().map(move |d| (t, d))).map(|(t, d)| (v[&(g, e, t, d)], 1.0)).collect();
            terms.extend(edges_of(g).filter(|&f| f != e).map(|f| (z[&(g, e, f)], 1.0)));
            terms.push((mu[g][e], -1.0));
            b.row("FlowOut", &[('g', g), ('e', e)], terms, Sense::Eq, 0.0);
        }
    }
    // subtour elimination
    if let Some(s) = &s_order {
        for (g, gr) in inst.graphs.iter().enumerate() {
            let n = gr.edges.len() as f64;
            for e in 0..gr.edges.len() {
                for f in 0..gr.edges.len() {
                    if e != f {
                        let terms = vec![(s[g][e], 1.0), (s[g][f], -1.0), (z[&(g, e, f)], n)];
                        b.row("Mtz", &[('g', g), ('e', e), ('f', f)], terms, Sense::Le, n - 1.0);
                    }
                }
            }
        }
    }
    // coverage
    for (g, gr) in inst.graphs.iter().enumerate() {
        for (e, edge) in gr.edges.iter().enumerate() {
            let idx = [('g', g), ('e', e)];
            b.row(
                "CovSplit",
                &idx,
                vec![(rho[g][e], 1.0), (lambda[g][e], -1.0), (numax[g][e], -1.0), (numin[g][e], 1.0)],
                Sense::Eq,
                0.0,
            );
            b.row("CovBackward", &idx, vec![(numax[g][e], 1.0), (entry[g][e], 1.0)], Sense::Le, 1.0);
            b.row("CovForward", &idx, vec![(numin[g][e], 1.0), (entry[g][e], -1.0)], Sense::Le, 0.0);
            if inst.visit_mode == VisitMode::PerEdge {
                b.row("CovEdge", &idx, vec![(pcov[g][e], 1.0)], Sense::Ge, edge.alpha);
            }
        }
        if inst.visit_mode == VisitMode::WholeGraph {
            let terms = gr.edges.iter().enumerate().map(|(e, edge)| (pcov[g][e], edge.length())).collect();
            b.row("CovGraph", &[('g', g)], terms, Sense::Ge, gr.alpha * gr.total_length());
        }
    }
    // pcov = mu * (numax + numin), with the sum in [0, 1]
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for (k, (c, sense, rhs)) in mccormick_rows(0.0, 1.0).into_iter().enumerate() {
                let terms = vec![(pcov[g][e], c[0]), (mu[g][e], c[1]), (numax[g][e], c[2]), (numin[g][e], c[2])];
                b.row("McCov", &[('g', g), ('e', e), ('k', k + 1)], terms, sense, rhs);
            }
        }
    }
    // entry and exit points on the edges
    for (g, gr) in inst.graphs.iter().enumerate() {
        for (e, edge) in gr.edges.iter().enumerate() {
            let (bp, cp) = (edge.segment.b, edge.segment.c);
            for (fam, pt, par) in [("R", rpt[g][e], rho[g][e]), ("L", lpt[g][e], lambda[g][e])] {
                let tag = if fam == "R" { "EdgePointEntry" } else { "EdgePointExit" };
                b.row(tag, &[('g', g), ('e', e), ('c', 0)], vec![(pt.0, 1.0), (par, -(cp.x - bp.x))], Sense::Eq, bp.x);
                b.row(tag, &[('g', g), ('e', e), ('c', 1)], vec![(pt.1, 1.0), (par, -(cp.y - bp.y))], Sense::Eq, bp.y);
            }
        }
    }
    // cones
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    let idx = [('g', g), ('e', e), ('t', t), ('d', d)];
                    b.soc("DistLaunch", &idx, xl[t], PointRef::Var(rpt[g][e].0, rpt[g][e].1), dl[&(g, e, t, d)]);
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            b.soc("DistEdge", &[('g', g), ('e', e)], rpt[g][e], PointRef::Var(lpt[g][e].0, lpt[g][e].1), dseg[g][e]);
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for f in 0..gr.edges.len() {
                if e != f {
                    let to = PointRef::Var(rpt[g][f].0, rpt[g][f].1);
                    b.soc("DistJump", &[('g', g), ('e', e), ('f', f)], lpt[g][e], to, dpair[&(g, e, f)]);
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    let idx = [('g', g), ('e', e), ('t', t), ('d', d)];
                    b.soc("DistRetrieve", &idx, lpt[g][e], PointRef::Var(xr[t].0, xr[t].1), dr[&(g, e, t, d)]);
                }
            }
        }
    }
    for t in 0..=n_t {
        b.soc("DistBetween", &[('t', t)], xr[t], PointRef::Var(xl[t + 1].0, xl[t + 1].1), drl[t]);
    }
    for t in stages.clone() {
        b.soc("DistWithin", &[('t', t)], xl[t], PointRef::Var(xr[t].0, xr[t].1), dlr[t]);
    }

    // drone timing, with every binary-distance product linearized
    let drone_terms = |g: usize, t1: usize, t2: usize, d: usize| -> Vec<(VarId, f64)> {
        let inv = 1.0 / inst.v_d;
        let mut terms: Vec<(VarId, f64)> = edges_of(g).map(|e| (pl[&(g, e, t1, d)], inv)).collect();
        for e in edges_of(g) {
            for f in edges_of(g) {
                if e != f {
                    terms.push((ppair[&(g, e, f)], inv));
                }
            }
            terms.push((pmu[g][e], inv));
            terms.push((pr[&(g, e, t2, d)], inv));
        }
        terms
    };
    match opts.mode {
        Mode::Sync => {
            for g in 0..n_g {
                let slack = bigm.m_op[g] / inst.v_d;
                for t in stages.clone() {
                    for d in drones.clone() {
                        let mut terms = drone_terms(g, t, t, d);
                        terms.push((dlr[t], -1.0 / inst.v_m));
                        terms.extend(sum_u(g, t, d).into_iter().map(|(x, _)| (x, slack)));
                        b.row("Dcw", &[('g', g), ('t', t), ('d', d)], terms, Sense::Le, slack);
                    }
                }
            }
        }
        Mode::Async => {
            let diameter = inst.diameter();
            for g in 0..n_g {
                for d in drones.clone() {
                    for t1 in stages.clone() {
                        for t2 in t1..=n_t {
                            let slack = (bigm.m_op[g] + (t2 - t1 + 1) as f64 * diameter) / inst.v_d;
                            let gate: Vec<(VarId, f64)> = sum_u(g, t1, d)
                                .into_iter()
                                .chain(sum_v(g, t2, d))
                                .map(|(x, _)| (x, slack))
                                .collect();
                            let idx = [('g', g), ('d', d), ('a', t1), ('b', t2)];
                            let mut terms = drone_terms(g, t1, t2, d);
                            for t in t1..=t2 {
                                terms.push((dlr[t], -1.0 / inst.v_m));
                                if t < t2 {
                                    terms.push((drl[t], -1.0 / inst.v_m));
                                }
                            }
                            terms.extend(gate.iter().copied());
                            b.row("DcwSpan", &idx, terms, Sense::Le, 2.0 * slack);
                            if t1 < t2 {
                                let mut terms = drone_terms(g, t1, t2, d);
                                terms.extend(gate.iter().copied());
                                b.row("EnduranceSpan", &idx, terms, Sense::Le, inst.endurance + 2.0 * slack);
                            }
                        }
                    }
                }
            }
            // a drone in flight is neither launched nor retrieved again
            for g in 0..n_g {
                for d in drones.clone() {
                    for t1 in stages.clone() {
                        for t2 in t1 + 1..=n_t {
                            let m = (t2 - t1) as f64;
                            let gate: Vec<(VarId, f64)> =
                                sum_u(g, t1, d).into_iter().chain(sum_v(g, t2, d)).map(|(x, _)| (x, m)).collect();
                            let idx = [('g', g), ('d', d), ('a', t1), ('b', t2)];
                            let mut terms: Vec<(VarId, f64)> =
                                (t1 + 1..=t2).flat_map(|t| (0..n_g).flat_map(move |h| sum_u(h, t, d))).collect();
                            terms.extend(gate.iter().copied());
                            b.row("NoLaunchInFlight", &idx, terms, Sense::Le, 2.0 * m);
                            let mut terms: Vec<(VarId, f64)> =
                                (t1..t2).flat_map(|t| (0..n_g).flat_map(move |h| sum_v(h, t, d))).collect();
                            terms.extend(gate.iter().copied());
                            b.row("NoRetrieveInFlight", &idx, terms, Sense::Le, 2.0 * m);
                        }
                    }
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    let idx = [('g', g), ('e', e), ('t', t), ('d', d)];
                    let key = (g, e, t, d);
                    b.mccormick("McLaunch", &idx, pl[&key], u[&key], dl[&key], 0.0, bigm.m_launch);
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for t in stages.clone() {
                for d in drones.clone() {
                    let idx = [('g', g), ('e', e), ('t', t), ('d', d)];
                    let key = (g, e, t, d);
                    b.mccormick("McRetrieve", &idx, pr[&key], v[&key], dr[&key], 0.0, bigm.m_retrieve);
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for e in 0..gr.edges.len() {
            for f in 0..gr.edges.len() {
                if e != f {
                    let key = (g, e, f);
                    let (lo, hi) = (bigm.m_pair_lo[g][e][f], bigm.m_pair[g][e][f]);
                    b.mccormick("McJump", &[('g', g), ('e', e), ('f', f)], ppair[&key], z[&key], dpair[&key], lo, hi);
                }
            }
        }
    }
    for (g, gr) in inst.graphs.iter().enumerate() {
        for (e, edge) in gr.edges.iter().enumerate() {
            b.mccormick("McEdge", &[('g', g), ('e', e)], pmu[g][e], mu[g][e], dseg[g][e], 0.0, edge.length());
        }
    }

    // mothership travel within a stage
    let cap = if opts.literal_cap { inst.endurance } else { inst.v_m * inst.endurance };
    for t in stages.clone() {
        b.row("Capacity", &[('t', t)], vec![(dlr[t], 1.0)], Sense::Le, cap);
    }

    // start at the origin, end at the destination
    let (o, dst) = (inst.origin, inst.destination);
    let last = n_t + 1;
    for (tag, t, p) in [("Origin", 0, o), ("Destination", last, dst)] {
        b.row(tag, &[('t', t), ('c', 0)], vec![(xl[t].0, 1.0)], Sense::Eq, p.x);
        b.row(tag, &[('t', t), ('c', 1)], vec![(xl[t].1, 1.0)], Sense::Eq, p.y);
        b.row(tag, &[('t', t), ('c', 2)], vec![(xr[t].0, 1.0)], Sense::Eq, p.x);
        b.row(tag, &[('t', t), ('c', 3)], vec![(xr[t].1, 1.0)], Sense::Eq, p.y);
    }

    // valid inequalities
    if opts.valid_inequalities {
        for t in stages.clone() {
            let mut terms: Vec<(VarId, f64)> = (0..n_g).flat_map(|g| drones.clone().flat_map(move |d| sum_u(g, t, d))).map(|(x, _)| (x, -1.0)).collect();
            terms.push((k[t - 1], 1.0));
            b.row("LaunchCount", &[('t', t)], terms, Sense::Eq, 0.0);
        }
        for t in 1..n_t {
            b.row("Monotonicity", &[('t', t)], vec![(beta[t - 1], 1.0), (beta[t], -1.0)], Sense::Le, 0.0);
        }
        for t in stages.clone() {
            let mut terms: Vec<(VarId, f64)> = (1..t).map(|t2| (k[t2 - 1], 1.0)).collect();
            terms.push((beta[t - 1], -(n_g as f64)));
            b.row("AllLaunched", &[('t', t)], terms, Sense::Ge, 0.0);
        }
        for t in stages.clone() {
            let mut terms = vec![(k[t - 1], 1.0), (beta[t - 1], 1.0)];
            if opts.mode == Mode::Async {
                // a stage that only retrieves drones is not empty
                terms.extend((0..n_g).flat_map(|g| drones.clone().flat_map(move |d| sum_v(g, t, d))));
            }
            b.row("NoEmptyStage", &[('t', t)], terms, Sense::Ge, 1.0);
        }
        if opts.mode == Mode::Sync {
            for t in stages.clone() {
                for d in 2..=n_d {
                    let mut terms: Vec<(VarId, f64)> = (0..n_g).flat_map(|g| sum_u(g, t, d)).collect();
                    terms.extend((0..n_g).flat_map(|g| sum_u(g, t, d - 1)).map(|(x, _)| (x, -1.0)));
                    b.row("DroneOrderLaunch", &[('t', t), ('d', d)], terms, Sense::Le, 0.0);
                }
            }
            for t in stages.clone() {
                for d in 2..=n_d {
                    let mut terms: Vec<(VarId, f64)> = (0..n_g).flat_map(|g| sum_v(g, t, d)).collect();
                    terms.extend((0..n_g).flat_map(|g| sum_v(g, t, d - 1)).map(|(x, _)| (x, -1.0)));
                    b.row("DroneOrderRetrieve", &[('t', t), ('d', d)], terms, Sense::Le, 0.0);
                }
            }
        }
    }
    b.m
}
