//! Grid-search estimate of the synchronous optimum, built only on the
//! instance geometry so that agreement with the exhaustive solver is
//! independent evidence.
//!
//! Launch and retrieve points range over a square grid; entry and exit
//! parameters over the lattice `k/50` plus the values that meet a coverage
//! requirement exactly. The search starts on a coarse grid over the whole
//! bounding box, then repeatedly halves the step in a window around the
//! incumbent points until the step reaches the requested resolution. Every
//! candidate it evaluates is feasible, so the result is an upper bound on
//! the optimum; its excess is of the order of the resolution plus the
//! lattice spacing times the edge lengths.

use crate::error::{Error, Result};
use crate::geometry::{dist, BBox, Point};
use crate::instance::{Instance, TargetGraph, VisitMode};

const LATTICE: usize = 50;
const MAX_GRAPHS: usize = 2;
const MAX_EDGES: usize = 2;
const MAX_DRONES: usize = 2;

#[derive(Debug, Clone)]
pub struct OracleEstimate {
    pub value: f64,
    /// Launch and retrieve point per stage of the best pattern found.
    pub stages: Vec<(Point, Point)>,
}

/// Drone cost between a first entry point and a last exit point.
struct GraphTable {
    entries: Vec<Point>,
    exits: Vec<Point>,
    /// `interior[a * exits.len() + b]`; infinite when no route connects them.
    interior: Vec<f64>,
}

fn lattice() -> Vec<f64> {
    (0..=LATTICE).map(|k| k as f64 / LATTICE as f64).collect()
}

fn with_offsets(base: &[f64], offsets: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = base.to_vec();
    for &b in base {
        for &o in offsets {
            for c in [b + o, b - o] {
                if (0.0..=1.0).contains(&c) {
                    v.push(c);
                }
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

struct EdgeGeom {
    b: Point,
    c: Point,
    len: f64,
    alpha: f64,
}

impl EdgeGeom {
    fn at(&self, t: f64) -> Point {
        Point::new(self.b.x + t * (self.c.x - self.b.x), self.b.y + t * (self.c.y - self.b.y))
    }
}

/// Whether the covered fractions satisfy the requirement of `g`.
fn covers(g: &TargetGraph, mode: VisitMode, used: &[(usize, f64)]) -> bool {
    match mode {
        VisitMode::PerEdge => {
            g.edges.iter().all(|e| {
                let got = used.iter().find(|u| u.0 == e.id).map_or(0.0, |u| u.1);
                got >= e.alpha - 1e-12
            })
        }
        VisitMode::WholeGraph => {
            let total: f64 = g.edges.iter().map(|e| e.segment.length()).sum();
            let got: f64 = used.iter().map(|&(e, f)| f * g.edges[e].segment.length()).sum();
            got >= g.alpha * total - 1e-12
        }
    }
}

fn build_table(g: &TargetGraph, mode: VisitMode) -> GraphTable {
    let edges: Vec<EdgeGeom> = g
        .edges
        .iter()
        .map(|e| EdgeGeom { b: e.segment.b, c: e.segment.c, len: e.segment.length(), alpha: e.alpha })
        .collect();
    let total: f64 = edges.iter().map(|e| e.len).sum();
    let lat = lattice();
    // fractions that meet a requirement exactly
    let tight: Vec<Vec<f64>> = edges
        .iter()
        .map(|e| match mode {
            VisitMode::PerEdge => vec![e.alpha],
            VisitMode::WholeGraph if e.len > 0.0 => vec![(g.alpha * total / e.len).min(1.0)],
            VisitMode::WholeGraph => vec![0.0],
        })
        .collect();
    let entry_params: Vec<(usize, f64)> = (0..edges.len()).flat_map(|e| lat.iter().map(move |&r| (e, r))).collect();
    let exit_params: Vec<(usize, f64)> =
        (0..edges.len()).flat_map(|e| with_offsets(&lat, &tight[e]).into_iter().map(move |r| (e, r))).collect();
    let entries: Vec<Point> = entry_params.iter().map(|&(e, r)| edges[e].at(r)).collect();
    let exits: Vec<Point> = exit_params.iter().map(|&(e, r)| edges[e].at(r)).collect();
    let mut interior = vec![f64::INFINITY; entries.len() * exits.len()];

    let frac = |fw: bool, r: f64, l: f64| if fw { l - r } else { r - l };
    for (ai, &(e1, r1)) in entry_params.iter().enumerate() {
        for (bi, &(e2, l2)) in exit_params.iter().enumerate() {
            let mut best = f64::INFINITY;
            if e1 == e2 {
                for fw in [true, false] {
                    let f = frac(fw, r1, l2);
                    if f >= 0.0 && covers(g, mode, &[(e1, f)]) {
                        best = best.min(f * edges[e1].len);
                    }
                }
            } else {
                // two visited edges: choose the first exit and the second entry
                let need_g = g.alpha * total;
                let mut l1s = lat.clone();
                let mut r2s = lat.clone();
                for d in [edges[e1].alpha, if edges[e1].len > 0.0 { need_g / edges[e1].len } else { 0.0 }] {
                    l1s.extend([r1 + d, r1 - d].into_iter().filter(|c| (0.0..=1.0).contains(c)));
                }
                for d in [edges[e2].alpha, if edges[e2].len > 0.0 { need_g / edges[e2].len } else { 0.0 }] {
                    r2s.extend([l2 + d, l2 - d].into_iter().filter(|c| (0.0..=1.0).contains(c)));
                }
                for fw1 in [true, false] {
                    for fw2 in [true, false] {
                        for &l1 in &l1s {
                            let f1 = frac(fw1, r1, l1);
                            if f1 < 0.0 {
                                continue;
                            }
                            let p1 = edges[e1].at(l1);
                            let mut cands = r2s.clone();
                            if mode == VisitMode::WholeGraph && edges[e2].len > 0.0 {
                                let rest = ((need_g - f1 * edges[e1].len) / edges[e2].len).max(0.0);
                                cands.extend([l2 + rest, l2 - rest].into_iter().filter(|c| (0.0..=1.0).contains(c)));
                            }
                            for &r2 in &cands {
                                let f2 = frac(fw2, r2, l2);
                                if f2 < 0.0 || !covers(g, mode, &[(e1, f1), (e2, f2)]) {
                                    continue;
                                }
                                let c = f1 * edges[e1].len + dist(p1, edges[e2].at(r2)) + f2 * edges[e2].len;
                                best = best.min(c);
                            }
                        }
                    }
                }
            }
            interior[ai * exits.len() + bi] = best;
        }
    }
    GraphTable { entries, exits, interior }
}

impl GraphTable {
    /// Shortest drone flight from each launch candidate to each retrieve candidate.
    fn flight(&self, launch: &[Point], retrieve: &[Point]) -> Vec<f64> {
        let nb = self.exits.len();
        let mut out = vec![f64::INFINITY; launch.len() * retrieve.len()];
        let mut h = vec![f64::INFINITY; nb];
        for (i, &xl) in launch.iter().enumerate() {
            h.iter_mut().for_each(|v| *v = f64::INFINITY);
            for (a, &pa) in self.entries.iter().enumerate() {
                let d = dist(xl, pa);
                let row = &self.interior[a * nb..(a + 1) * nb];
                for b in 0..nb {
                    let c = d + row[b];
                    if c < h[b] {
                        h[b] = c;
                    }
                }
            }
            for (j, &xr) in retrieve.iter().enumerate() {
                let mut best = f64::INFINITY;
                for b in 0..nb {
                    if h[b] < best {
                        best = best.min(h[b] + dist(self.exits[b], xr));
                    }
                }
                out[i * retrieve.len() + j] = best;
            }
        }
        out
    }
}

/// Ordered partitions of the graphs into stages of at most `cap` graphs.
fn stage_patterns(n: usize, cap: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let block: Vec<usize> = (0..n).filter(|g| mask >> g & 1 == 1).collect();
        if block.len() > cap {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|g| mask >> g & 1 == 0).collect();
        for tail in stage_patterns(rest.len(), cap) {
            let mut p = vec![block.clone()];
            p.extend(tail.into_iter().map(|b| b.into_iter().map(|k| rest[k]).collect()));
            out.push(p);
        }
    }
    out
}

fn grid(bb: &BBox, step: f64) -> Vec<Point> {
    let nx = (bb.width() / step).ceil() as usize;
    let ny = (bb.height() / step).ceil() as usize;
    let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            pts.push(Point::new(bb.min.x + i as f64 * step, bb.min.y + j as f64 * step));
        }
    }
    pts
}

fn window(center: Point, step: f64, half: usize) -> Vec<Point> {
    let h = half as f64 * step;
    grid(&BBox::new(Point::new(center.x - h, center.y - h), Point::new(center.x + h, center.y + h)), step)
}

/// Best route for a fixed pattern over per-stage candidate sets.
fn run_pattern(
    inst: &Instance,
    tables: &[GraphTable],
    pattern: &[Vec<usize>],
    cands: &[(Vec<Point>, Vec<Point>)],
) -> Option<(f64, Vec<(Point, Point)>)> {
    let cap = inst.v_m * inst.endurance;
    let ratio = inst.v_m / inst.v_d;
    let mut prev_pts = vec![inst.origin];
    let mut prev_val = vec![0.0];
    // back pointers per stage: for each retrieve candidate, (launch index, previous retrieve index)
    let mut back: Vec<Vec<(usize, usize)>> = Vec::new();
    for (stage, (launch, retrieve)) in pattern.iter().zip(cands) {
        let flights: Vec<Vec<f64>> = stage.iter().map(|&g| tables[g].flight(launch, retrieve)).collect();
        let mut enter = vec![(f64::INFINITY, 0usize); launch.len()];
        for (i, &xl) in launch.iter().enumerate() {
            for (k, &xp) in prev_pts.iter().enumerate() {
                let v = prev_val[k] + dist(xp, xl);
                if v < enter[i].0 {
                    enter[i] = (v, k);
                }
            }
        }
        let mut val = vec![f64::INFINITY; retrieve.len()];
        let mut bp = vec![(0usize, 0usize); retrieve.len()];
        for (i, &xl) in launch.iter().enumerate() {
            if !enter[i].0.is_finite() {
                continue;
            }
            for (j, &xr) in retrieve.iter().enumerate() {
                let longest = flights.iter().map(|f| f[i * retrieve.len() + j]).fold(0.0, f64::max);
                if longest / inst.v_d > inst.endurance {
                    continue;
                }
                let service = dist(xl, xr).max(ratio * longest);
                if service > cap {
                    continue;
                }
                let v = enter[i].0 + service;
                if v < val[j] {
                    val[j] = v;
                    bp[j] = (i, enter[i].1);
                }
            }
        }
        back.push(bp);
        prev_pts = retrieve.clone();
        prev_val = val;
    }
    let (mut j, best) = prev_pts
        .iter()
        .zip(&prev_val)
        .map(|(&p, &v)| v + dist(p, inst.destination))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if !best.is_finite() {
        return None;
    }
    let mut stages = vec![(inst.origin, inst.origin); pattern.len()];
    for t in (0..pattern.len()).rev() {
        let (i, k) = back[t][j];
        stages[t] = (cands[t].0[i], cands[t].1[j]);
        j = k;
    }
    Some((best, stages))
}

/// Estimates the synchronous optimum on a grid of the given resolution.
pub fn grid_oracle(inst: &Instance, resolution: f64) -> Result<OracleEstimate> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidParams("resolution must be positive".into()));
    }
    if inst.graphs.len() > MAX_GRAPHS || inst.n_drones > MAX_DRONES || inst.graphs.iter().any(|g| g.edges.len() > MAX_EDGES) {
        return Err(Error::LimitsExceeded("grid oracle handles at most 2 graphs of 2 edges and 2 drones".into()));
    }
    let tables: Vec<GraphTable> = inst.graphs.iter().map(|g| build_table(g, inst.visit_mode)).collect();
    let bb = inst.bbox();
    let area = bb.width().max(resolution) * bb.height().max(resolution);
    let step = (area / 600.0).sqrt().max(bb.width().max(bb.height()) / 150.0).max(resolution);
    let coarse = grid(
        &BBox::new(Point::new(bb.min.x - step, bb.min.y - step), Point::new(bb.max.x + step, bb.max.y + step)),
        step,
    );

    let mut best: Option<OracleEstimate> = None;
    for pattern in stage_patterns(inst.graphs.len(), inst.n_drones) {
        let mut cands: Vec<(Vec<Point>, Vec<Point>)> = vec![(coarse.clone(), coarse.clone()); pattern.len()];
        let mut found = run_pattern(inst, &tables, &pattern, &cands);
        let mut h = step;
        while h > resolution {
            let Some((_, ref stages)) = found else { break };
            h = (h / 2.0).max(resolution);
            cands = stages.iter().map(|&(l, r)| (window(l, h, 8), window(r, h, 8))).collect();
            if let Some(f) = run_pattern(inst, &tables, &pattern, &cands) {
                if f.0 <= found.as_ref().unwrap().0 {
                    found = Some(f);
                }
            }
        }
        if let Some((value, stages)) = found {
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(OracleEstimate { value, stages });
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible("no grid point pattern is feasible".into()))
}
