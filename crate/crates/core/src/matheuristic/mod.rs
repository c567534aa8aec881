//! Five-step matheuristic for the synchronous problem.
//!
//! 1. Route a drone over each graph from the origin and record its entry and
//!    exit points and interior length.
//! 2. Randomly merge graphs into clusters served from a common meeting point
//!    while the fleet size and drone endurance allow it.
//! 3. Pull each meeting point towards the origin as far as endurance allows.
//! 4. Route the mothership through the reference points.
//!
//! Steps 2-4 repeat for several seeds. The best clustering fixes every
//! combinatorial decision and step 5 solves the remaining convex problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::convex_sub::{solve_fixed, FixedCombinatorics, GraphVisit, SolveOptions};
use crate::error::{Error, Result};
use crate::geometry::{dist, Point, Segment};
use crate::instance::{Instance, TargetGraph, VisitMode};
use crate::solution::{EdgeVisit, Mode, Solution};

/// A drone route over one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DroneTour {
    pub visits: Vec<EdgeVisit>,
    /// Where the drone enters its first edge.
    pub entry: Point,
    /// Where it leaves its last edge.
    pub exit: Point,
    /// Drone travel from `entry` to `exit` along the route.
    pub interior_length: f64,
}

impl DroneTour {
    /// Drone flight time when launched and retrieved at `p`.
    pub fn flight_time(&self, p: Point, v_d: f64) -> f64 {
        (dist(p, self.entry) + self.interior_length + dist(self.exit, p)) / v_d
    }
}

/// Where on `seg` to enter when arriving from `from` and covering `cover`
/// of it: the closest admissible entry point, forward on ties.
fn place(seg: &Segment, from: Point, cover: f64, edge: usize) -> (EdgeVisit, Point, Point) {
    let cover = cover.clamp(0.0, 1.0);
    let len = seg.length();
    let fwd_range = Segment::new(seg.b, seg.point_at_clamped(1.0 - cover));
    let bwd_range = Segment::new(seg.point_at_clamped(cover), seg.c);
    let param = |r: &Segment, lo: f64, hi: f64, p: Point| -> f64 {
        if len == 0.0 {
            return lo;
        }
        let q = r.project(p);
        (dist(seg.b, q) / len).clamp(lo, hi)
    };
    let rho_f = param(&fwd_range, 0.0, 1.0 - cover, from);
    let rho_b = param(&bwd_range, cover, 1.0, from);
    let (ef, eb) = (seg.point_at_clamped(rho_f), seg.point_at_clamped(rho_b));
    if dist(from, ef) <= dist(from, eb) {
        let lambda = (rho_f + cover).min(1.0);
        (EdgeVisit { edge, rho: rho_f, lambda, forward: true }, ef, seg.point_at_clamped(lambda))
    } else {
        let lambda = (rho_b - cover).max(0.0);
        (EdgeVisit { edge, rho: rho_b, lambda, forward: false }, eb, seg.point_at_clamped(lambda))
    }
}

fn lay_out(g: &TargetGraph, order: &[usize], cover: &[f64], anchor: Point) -> DroneTour {
    let mut from = anchor;
    let mut visits = Vec::with_capacity(order.len());
    let mut interior = 0.0;
    let mut entry = anchor;
    for (k, &e) in order.iter().enumerate() {
        let (visit, enter, leave) = place(&g.edges[e].segment, from, cover[e], e);
        if k == 0 {
            entry = enter;
        } else {
            interior += dist(from, enter);
        }
        interior += dist(enter, leave);
        visits.push(visit);
        from = leave;
    }
    DroneTour { visits, entry, exit: from, interior_length: interior }
}

fn path_length(anchor: Point, pts: &[Point]) -> f64 {
    let mut prev = anchor;
    let mut total = 0.0;
    for &p in pts {
        total += dist(prev, p);
        prev = p;
    }
    total
}

/// Route over one graph, starting near `anchor`.
///
/// Edges are ordered by nearest insertion over their midpoints, seeded at the
/// edge closest to `anchor`, and improved by 2-opt. Each visited edge gets
/// the least coverage its mode allows; with whole-graph coverage edges are
/// taken in insertion order until the required length is reached. Among the
/// rotations of the order, the one whose round trip from `anchor` is
/// shortest wins.
pub fn step1_drone_tour(g: &TargetGraph, anchor: Point, mode: VisitMode) -> DroneTour {
    let n = g.edges.len();
    let mids: Vec<Point> = g.edges.iter().map(|e| e.segment.midpoint()).collect();
    let nearest = (0..n)
        .min_by(|&a, &b| g.edges[a].segment.dist_to_point(anchor).total_cmp(&g.edges[b].segment.dist_to_point(anchor)))
        .expect("graph has edges");

    // insertion sequence over all edges
    let mut seq = vec![nearest];
    let mut order = vec![nearest];
    while order.len() < n {
        let next = (0..n)
            .filter(|e| !order.contains(e))
            .min_by(|&a, &b| {
                let da = order.iter().map(|&o| dist(mids[a], mids[o])).fold(f64::INFINITY, f64::min);
                let db = order.iter().map(|&o| dist(mids[b], mids[o])).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db)
            })
            .unwrap();
        seq.push(next);
        order.push(next);
    }

    let mut cover = vec![0.0; n];
    let mut chosen: Vec<usize> = Vec::new();
    match mode {
        VisitMode::PerEdge => {
            for &e in &seq {
                if g.edges[e].alpha > 0.0 {
                    cover[e] = g.edges[e].alpha.min(1.0);
                    chosen.push(e);
                }
            }
        }
        VisitMode::WholeGraph => {
            let mut need = g.alpha * g.total_length();
            for &e in &seq {
                if need <= 0.0 {
                    break;
                }
                let len = g.edges[e].length();
                cover[e] = if len > 0.0 { (need / len).min(1.0) } else { 0.0 };
                need -= cover[e] * len;
                chosen.push(e);
            }
        }
    }
    if chosen.is_empty() {
        chosen.push(nearest);
    }

    // nearest insertion of the chosen edges, then 2-opt
    let mut route: Vec<usize> = vec![chosen[0]];
    for &e in &chosen[1..] {
        let best = (0..=route.len())
            .min_by(|&a, &b| {
                let cost = |pos: usize| {
                    let mut r = route.clone();
                    r.insert(pos, e);
                    path_length(anchor, &r.iter().map(|&x| mids[x]).collect::<Vec<_>>())
                };
                cost(a).total_cmp(&cost(b))
            })
            .unwrap();
        route.insert(best, e);
    }
    let cost = |r: &[usize]| path_length(anchor, &r.iter().map(|&x| mids[x]).collect::<Vec<_>>());
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..route.len() {
            for j in i + 1..route.len() {
                let mut cand = route.clone();
                cand[i..=j].reverse();
                if cost(&cand) < cost(&route) - 1e-12 {
                    route = cand;
                    improved = true;
                }
            }
        }
    }

    let mut best: Option<(f64, DroneTour)> = None;
    for r in 0..route.len() {
        let mut rot = route.clone();
        rot.rotate_left(r);
        let tour = lay_out(g, &rot, &cover, anchor);
        let c = dist(anchor, tour.entry) + tour.interior_length + dist(tour.exit, anchor);
        if best.as_ref().is_none_or(|b| c < b.0 - 1e-12) {
            best = Some((c, tour));
        }
    }
    best.unwrap().1
}

/// Partition of the graphs into clusters, each served from one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub meeting_points: Vec<Point>,
    pub reference_points: Vec<Point>,
}

fn cluster_time(tours: &[&DroneTour], p: Point, v_d: f64) -> f64 {
    tours.iter().map(|t| t.flight_time(p, v_d)).fold(0.0, f64::max)
}

/// Point minimizing the longest flight time of `tours`, by subgradient
/// descent with diminishing steps (200 iterations). Returns the best point
/// seen and its time.
pub fn meeting_point(tours: &[&DroneTour], v_d: f64) -> (Point, f64) {
    let pts: Vec<Point> = tours.iter().flat_map(|t| [t.entry, t.exit]).collect();
    let k = pts.len() as f64;
    let mut p = Point::new(pts.iter().map(|q| q.x).sum::<f64>() / k, pts.iter().map(|q| q.y).sum::<f64>() / k);
    if tours.len() == 1 {
        p = tours[0].entry.lerp(tours[0].exit, 0.5);
    }
    let spread = pts.iter().flat_map(|a| pts.iter().map(move |b| dist(*a, *b))).fold(0.0, f64::max).max(1e-9);
    let mut best = (p, cluster_time(tours, p, v_d));
    for it in 0..200 {
        let worst = tours.iter().max_by(|a, b| a.flight_time(p, v_d).total_cmp(&b.flight_time(p, v_d))).unwrap();
        let unit = |q: Point| {
            let d = dist(p, q);
            if d > 0.0 {
                Point::new((p.x - q.x) / d, (p.y - q.y) / d)
            } else {
                Point::new(0.0, 0.0)
            }
        };
        let (a, b) = (unit(worst.entry), unit(worst.exit));
        let gx = a.x + b.x;
        let gy = a.y + b.y;
        let norm = (gx * gx + gy * gy).sqrt();
        if norm < 1e-12 {
            break;
        }
        let step = 0.5 * spread / ((it + 1) as f64).sqrt();
        p = Point::new(p.x - step * gx / norm, p.y - step * gy / norm);
        let t = cluster_time(tours, p, v_d);
        if t < best.1 {
            best = (p, t);
        }
    }
    best
}

/// Random pairwise merging. A merge needs the union to fit the fleet (size
/// at most `n_drones`, or below it with `strict_size`) and a point from
/// which every member tour fits the endurance.
pub fn step2_cluster(
    inst: &Instance,
    tours: &[DroneTour],
    seed: u64,
    maxit: usize,
    strict_size: bool,
) -> Result<Clustering> {
    let slack = 1e-9;
    let mut clusters: Vec<Vec<usize>> = (0..tours.len()).map(|g| vec![g]).collect();
    let mut points = Vec::with_capacity(tours.len());
    for (g, t) in tours.iter().enumerate() {
        let (p, time) = meeting_point(&[t], inst.v_d);
        if time > inst.endurance + slack {
            return Err(Error::InfeasibleGraph { graph: g });
        }
        points.push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nit = 1;
    while nit < maxit && clusters.len() >= 2 {
        let i = rng.gen_range(0..clusters.len() - 1);
        let j = rng.gen_range(i + 1..clusters.len());
        let size = clusters[i].len() + clusters[j].len();
        let fits = if strict_size { size < inst.n_drones } else { size <= inst.n_drones };
        if fits {
            let members: Vec<&DroneTour> = clusters[i].iter().chain(&clusters[j]).map(|&g| &tours[g]).collect();
            let (p, time) = meeting_point(&members, inst.v_d);
            if time <= inst.endurance + slack {
                let moved = clusters.remove(j);
                points.remove(j);
                clusters[i].extend(moved);
                clusters[i].sort_unstable();
                points[i] = p;
            }
        }
        nit += 1;
    }
    let reference_points = points.clone();
    Ok(Clustering { clusters, meeting_points: points, reference_points })
}

/// Moves each meeting point towards the origin, stopping at the farthest
/// point along that segment where every member tour still fits the
/// endurance (bisection, 40 iterations).
pub fn step3_reference_points(c: &Clustering, inst: &Instance, tours: &[DroneTour]) -> Clustering {
    let mut out = c.clone();
    for (k, members) in c.clusters.iter().enumerate() {
        let ts: Vec<&DroneTour> = members.iter().map(|&g| &tours[g]).collect();
        let start = c.meeting_points[k];
        let ok = |p: Point| cluster_time(&ts, p, inst.v_d) <= inst.endurance + 1e-9;
        out.reference_points[k] = if ok(inst.origin) {
            inst.origin
        } else {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if ok(start.lerp(inst.origin, mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            start.lerp(inst.origin, lo)
        };
    }
    out
}

/// Shortest path `orig -> all points -> dest`: exact dynamic programming up
/// to 12 points, nearest neighbour plus 2-opt beyond.
pub fn step4_tsp(points: &[Point], orig: Point, dest: Point) -> (Vec<usize>, f64) {
    let n = points.len();
    let total = |order: &[usize]| {
        let mut pts: Vec<Point> = order.iter().map(|&i| points[i]).collect();
        pts.push(dest);
        path_length(orig, &pts)
    };
    if n == 0 {
        return (Vec::new(), dist(orig, dest));
    }
    if n <= 12 {
        let full = (1usize << n) - 1;
        let mut cost = vec![f64::INFINITY; (1 << n) * n];
        let mut back = vec![usize::MAX; (1 << n) * n];
        for i in 0..n {
            cost[(1 << i) * n + i] = dist(orig, points[i]);
        }
        for set in 1..=full {
            for last in 0..n {
                let c = cost[set * n + last];
                if set >> last & 1 == 0 || !c.is_finite() {
                    continue;
                }
                for next in 0..n {
                    if set >> next & 1 == 1 {
                        continue;
                    }
                    let s2 = set | 1 << next;
                    let c2 = c + dist(points[last], points[next]);
                    if c2 < cost[s2 * n + next] {
                        cost[s2 * n + next] = c2;
                        back[s2 * n + next] = last;
                    }
                }
            }
        }
        let last = (0..n)
            .min_by(|&a, &b| {
                (cost[full * n + a] + dist(points[a], dest)).total_cmp(&(cost[full * n + b] + dist(points[b], dest)))
            })
            .unwrap();
        let mut order = vec![last];
        let (mut set, mut cur) = (full, last);
        while back[set * n + cur] != usize::MAX {
            let prev = back[set * n + cur];
            set &= !(1 << cur);
            cur = prev;
            order.push(cur);
        }
        order.reverse();
        let len = total(&order);
        return (order, len);
    }
    let mut order = Vec::with_capacity(n);
    let mut cur = orig;
    let mut left: Vec<usize> = (0..n).collect();
    while !left.is_empty() {
        let k = (0..left.len()).min_by(|&a, &b| dist(cur, points[left[a]]).total_cmp(&dist(cur, points[left[b]]))).unwrap();
        let i = left.remove(k);
        order.push(i);
        cur = points[i];
    }
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n {
            for j in i + 1..n {
                let mut cand = order.clone();
                cand[i..=j].reverse();
                if total(&cand) < total(&order) - 1e-12 {
                    order = cand;
                    improved = true;
                }
            }
        }
    }
    let len = total(&order);
    (order, len)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatheuristicParams {
    /// Number of clustering restarts.
    pub maxseed: usize,
    /// Merge attempts per restart.
    pub maxit: usize,
    pub tol: f64,
    /// Base seed; restart `k` uses `seed + k`.
    pub seed: u64,
    /// Merge only while the cluster stays smaller than the fleet.
    pub strict_size: bool,
}

impl Default for MatheuristicParams {
    fn default() -> Self {
        MatheuristicParams { maxseed: 10, maxit: 50, tol: 1e-6, seed: 0, strict_size: false }
    }
}

#[derive(Debug, Clone)]
pub struct MatheuristicResult {
    pub solution: Solution,
    /// The binaries fixed for the final solve.
    pub fixed: FixedCombinatorics,
    pub tours: Vec<DroneTour>,
    pub clustering: Clustering,
    /// Mothership route length through the reference points.
    pub tsp_length: f64,
    pub seed: u64,
}

/// Stages follow the route order; within a cluster graphs take drones in
/// index order.
pub fn fix_binaries(clustering: &Clustering, order: &[usize], tours: &[DroneTour]) -> FixedCombinatorics {
    let mut visits = Vec::new();
    for (stage, &k) in order.iter().enumerate() {
        for (drone, &g) in clustering.clusters[k].iter().enumerate() {
            let t = &tours[g];
            visits.push(GraphVisit {
                graph: g,
                drone,
                launch_stage: stage,
                retrieve_stage: stage,
                edges: t.visits.iter().map(|v| v.edge).collect(),
                forward: t.visits.iter().map(|v| v.forward).collect(),
            });
        }
    }
    visits.sort();
    FixedCombinatorics { n_stages: order.len(), visits }
}

/// Runs all five steps and returns a validated synchronous solution.
pub fn run_matheuristic(inst: &Instance, params: &MatheuristicParams) -> Result<MatheuristicResult> {
    if params.maxseed == 0 || params.maxit == 0 {
        return Err(Error::InvalidParams("maxseed and maxit must be positive".into()));
    }
    let tours: Vec<DroneTour> = inst.graphs.iter().map(|g| step1_drone_tour(g, inst.origin, inst.visit_mode)).collect();
    let mut candidates: Vec<(f64, u64, Clustering, Vec<usize>)> = (0..params.maxseed as u64)
        .into_par_iter()
        .map(|k| {
            let seed = params.seed.wrapping_add(k);
            let c = step2_cluster(inst, &tours, seed, params.maxit, params.strict_size)?;
            let c = step3_reference_points(&c, inst, &tours);
            let (order, len) = step4_tsp(&c.reference_points, inst.origin, inst.destination);
            Ok((len, seed, c, order))
        })
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let opts = SolveOptions::with_tol(params.tol);
    let mut last_err = None;
    let mut tried: Vec<FixedCombinatorics> = Vec::new();
    for (len, seed, clustering, order) in candidates {
        let fixed = fix_binaries(&clustering, &order, &tours);
        if tried.contains(&fixed) {
            continue;
        }
        tried.push(fixed.clone());
        match solve_fixed(inst, &fixed, Mode::Sync, &opts) {
            Ok(r) if r.residuals.passed() => {
                return Ok(MatheuristicResult { solution: r.solution, fixed, tours, clustering, tsp_length: len, seed })
            }
            Ok(r) => last_err = Some(Error::Infeasible(format!("final solve failed validation: {}", r.residuals))),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Infeasible("no clustering".into())))
}
