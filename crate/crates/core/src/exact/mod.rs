//! Ground truth for tiny instances: every combinatorial skeleton is
//! enumerated and its continuous subproblem solved; [`oracle`] provides an
//! independent grid-search estimate.

pub mod oracle;

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::convex_sub::{solve_fixed, FixedCombinatorics, GraphVisit, SolveOptions};
use crate::error::{Error, Result};
use crate::instance::{Instance, TargetGraph, VisitMode};
use crate::solution::{Mode, Solution};

pub use oracle::grid_oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_graphs: usize,
    pub max_edges: usize,
    pub max_drones: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_graphs: 2, max_edges: 3, max_drones: 2 }
    }
}

impl Limits {
    pub fn check(&self, inst: &Instance) -> Result<()> {
        if inst.graphs.len() > self.max_graphs {
            return Err(Error::LimitsExceeded(format!("{} graphs (max {})", inst.graphs.len(), self.max_graphs)));
        }
        if let Some(g) = inst.graphs.iter().find(|g| g.edges.len() > self.max_edges) {
            return Err(Error::LimitsExceeded(format!("graph {} has {} edges (max {})", g.id, g.edges.len(), self.max_edges)));
        }
        if inst.n_drones > self.max_drones {
            return Err(Error::LimitsExceeded(format!("{} drones (max {})", inst.n_drones, self.max_drones)));
        }
        Ok(())
    }
}

/// A visited-edge order with directions for one graph.
type Route = (Vec<usize>, Vec<bool>);

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every admissible visited subset, order and direction choice for a graph.
pub fn graph_routes(g: &TargetGraph, mode: VisitMode) -> Vec<Route> {
    let n = g.edges.len();
    let required: u32 = match mode {
        VisitMode::PerEdge => g.edges.iter().filter(|e| e.alpha > 0.0).fold(0, |m, e| m | 1 << e.id),
        VisitMode::WholeGraph => 0,
    };
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask & required != required {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|&e| mask >> e & 1 == 1).collect();
        for order in permutations(&subset) {
            for dirs in 0u32..(1 << order.len()) {
                let forward = (0..order.len()).map(|k| dirs >> k & 1 == 1).collect();
                out.push((order.clone(), forward));
            }
        }
    }
    out
}

/// (graph, drone, launch stage, retrieve stage) for every graph.
type Pattern = Vec<(usize, usize, usize, usize)>;

fn sync_patterns(n_graphs: usize, n_drones: usize) -> Vec<Pattern> {
    fn rec(remaining: u32, stage: usize, cap: usize, acc: &mut Pattern, out: &mut Vec<Pattern>) {
        if remaining == 0 {
            let mut p = acc.clone();
            p.sort_unstable();
            out.push(p);
            return;
        }
        let mut sub = remaining;
        let mut blocks = Vec::new();
        while sub != 0 {
            blocks.push(sub);
            sub = (sub - 1) & remaining;
        }
        blocks.sort_unstable();
        for block in blocks {
            if block.count_ones() as usize > cap {
                continue;
            }
            let before = acc.len();
            let members = (0..32).filter(|g| block >> g & 1 == 1);
            for (d, g) in members.enumerate() {
                acc.push((g, d, stage, stage));
            }
            rec(remaining & !block, stage + 1, cap, acc, out);
            acc.truncate(before);
        }
    }
    let mut out = Vec::new();
    rec((1u32 << n_graphs) - 1, 0, n_drones, &mut Vec::new(), &mut out);
    out
}

/// Relabels stages densely and drones by first use so that equivalent
/// patterns compare equal.
fn canonical(p: &Pattern) -> Pattern {
    let mut stages: Vec<usize> = p.iter().flat_map(|&(_, _, a, b)| [a, b]).collect();
    stages.sort_unstable();
    stages.dedup();
    let st = |t: usize| stages.binary_search(&t).unwrap();
    let mut firsts: Vec<(usize, usize, usize)> = Vec::new();
    for &(g, d, a, _) in p {
        match firsts.iter_mut().find(|f| f.2 == d) {
            Some(f) => *f = (*f).min((st(a), g, d)),
            None => firsts.push((st(a), g, d)),
        }
    }
    firsts.sort_unstable();
    let relabel = |d: usize| firsts.iter().position(|f| f.2 == d).unwrap();
    let mut q: Pattern = p.iter().map(|&(g, d, a, b)| (g, relabel(d), st(a), st(b))).collect();
    q.sort_unstable();
    q
}

fn async_patterns(n_graphs: usize, n_drones: usize) -> Vec<Pattern> {
    let t = n_graphs;
    let mut slots = Vec::new();
    for d in 0..n_drones {
        for a in 0..t {
            for b in a..t {
                slots.push((d, a, b));
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    if slots.is_empty() && n_graphs > 0 {
        return out;
    }
    let mut idx = vec![0usize; n_graphs];
    'outer: loop {
        let p: Pattern = idx.iter().enumerate().map(|(g, &k)| (g, slots[k].0, slots[k].1, slots[k].2)).collect();
        let ok = p.iter().enumerate().all(|(i, x)| {
            p[i + 1..].iter().all(|y| x.1 != y.1 || x.3 < y.2 || y.3 < x.2)
        });
        if ok {
            let c = canonical(&p);
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        for k in idx.iter_mut() {
            *k += 1;
            if *k < slots.len() {
                continue 'outer;
            }
            *k = 0;
        }
        break;
    }
    out
}

/// Every skeleton of the instance in a deterministic order, without duplicates.
pub fn enumerate_skeletons(inst: &Instance, mode: Mode, limits: &Limits) -> Result<Vec<FixedCombinatorics>> {
    limits.check(inst)?;
    let n = inst.graphs.len();
    let patterns = match mode {
        Mode::Sync => sync_patterns(n, inst.n_drones),
        Mode::Async => async_patterns(n, inst.n_drones),
    };
    let routes: Vec<Vec<Route>> = inst.graphs.iter().map(|g| graph_routes(g, inst.visit_mode)).collect();
    let mut out = Vec::new();
    for p in patterns {
        let n_stages = p.iter().map(|x| x.3 + 1).max().unwrap_or(0);
        let mut choice = vec![0usize; n];
        'product: loop {
            let visits = p
                .iter()
                .map(|&(g, d, a, b)| {
                    let (edges, forward) = routes[g][choice[g]].clone();
                    GraphVisit { graph: g, drone: d, launch_stage: a, retrieve_stage: b, edges, forward }
                })
                .collect();
            out.push(FixedCombinatorics { n_stages, visits });
            for g in 0..n {
                choice[g] += 1;
                if choice[g] < routes[g].len() {
                    continue 'product;
                }
                choice[g] = 0;
            }
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub solution: Solution,
    pub skeleton: FixedCombinatorics,
    pub skeletons: usize,
    pub feasible: usize,
}

/// Minimum over all skeletons of the continuous optimum. Skeletons that are
/// infeasible or fail to converge are skipped; ties go to the first
/// skeleton in enumeration order.
pub fn solve_exact(inst: &Instance, mode: Mode, limits: &Limits, opts: &SolveOptions) -> Result<ExactOutcome> {
    let skeletons = enumerate_skeletons(inst, mode, limits)?;
    let results: Vec<Option<(f64, Solution)>> = skeletons
        .par_iter()
        .map(|f| solve_fixed(inst, f, mode, opts).ok().filter(|r| r.residuals.passed()).map(|r| (r.objective, r.solution)))
        .collect();
    let feasible = results.iter().filter(|r| r.is_some()).count();
    let best = results
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|(v, s)| (v, i, s)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    match best {
        Some((_, i, solution)) => {
            Ok(ExactOutcome { solution, skeleton: skeletons[i].clone(), skeletons: skeletons.len(), feasible })
        }
        None => Err(Error::Infeasible(format!("none of the {} skeletons admits a feasible placement", skeletons.len()))),
    }
}

#[cfg(test)]
mod tests;
