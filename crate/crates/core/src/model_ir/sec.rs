use std::collections::VecDeque;

use super::build::label;
use super::{LinearConstraint, Model, Sense, VarId};

/// Shortest directed cycle in a graph on `n` nodes, as its node sequence.
/// Ties go to the cycle found from the lowest start node.
pub fn shortest_cycle(n: usize, arcs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in arcs {
        adj[a].push(b);
    }
    let mut best: Option<Vec<usize>> = None;
    for start in 0..n {
        // BFS from start; the first arc back into start closes the shortest cycle through it
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut closing = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if y == start {
                    closing = Some(x);
                    break 'bfs;
                }
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if let Some(mut x) = closing {
            let mut cycle = vec![x];
            while x != start {
                x = parent[x];
                cycle.push(x);
            }
            cycle.reverse();
            if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
    }
    best
}

/// Largest graph searched exhaustively; bigger graphs fall back to the
/// shortest cycle among arcs with `z > 0.5`.
pub const EXACT_SEC_EDGES: usize = 20;

/// Smallest edge subset `S` (as a bitmask) whose order arcs sum above
/// `|S| - 1`; ties go to the larger excess, then the lower mask.
/// `w[e][f]` holds `z[e][f]`.
fn min_violated_subset(w: &[Vec<f64>]) -> Option<u32> {
    let n = w.len();
    let mut inside = vec![0.0f64; 1 << n];
    let mut best: Option<(u32, f64, u32)> = None;
    for mask in 1u32..1 << n {
        let e = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut add = 0.0;
        let mut bits = rest;
        while bits != 0 {
            let f = bits.trailing_zeros() as usize;
            add += w[e][f] + w[f][e];
            bits &= bits - 1;
        }
        inside[mask as usize] = inside[rest as usize] + add;
        let size = mask.count_ones();
        let excess = inside[mask as usize] - (size as f64 - 1.0);
        if size >= 2 && excess > 1e-9 {
            let better = match best {
                None => true,
                Some((k, x, _)) => size < k || (size == k && excess > x + 1e-12),
            };
            if better {
                best = Some((size, excess, mask));
            }
        }
    }
    best.map(|b| b.2)
}

/// Violated subtour cuts `sum of z over ordered pairs in S <= |S| - 1`, at
/// most one per graph, for any (possibly fractional) point. Graphs up to
/// [`EXACT_SEC_EDGES`] edges are searched exhaustively for the violated
/// subset of least cardinality.
pub fn separate_sec(model: &Model, values: &[f64]) -> Vec<LinearConstraint> {
    let mut z_of: Vec<Vec<Vec<Option<usize>>>> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for (i, v) in model.variables.iter().enumerate() {
        if v.family == "mu" {
            let g = v.indices[0];
            if sizes.len() <= g {
                sizes.resize(g + 1, 0);
            }
            sizes[g] = sizes[g].max(v.indices[1] + 1);
        }
        if v.family == "z" {
            let (g, e, f) = (v.indices[0], v.indices[1], v.indices[2]);
            if z_of.len() <= g {
                z_of.resize(g + 1, Vec::new());
            }
            let n = e.max(f) + 1;
            if z_of[g].len() < n {
                z_of[g].resize(n, Vec::new());
            }
            for row in z_of[g].iter_mut() {
                if row.len() < n {
                    row.resize(n, None);
                }
            }
            z_of[g][e][f] = Some(i);
        }
    }
    let mut cuts = Vec::new();
    for (g, ids) in z_of.iter().enumerate() {
        let n = sizes.get(g).copied().unwrap_or(0).max(ids.len());
        let mut w = vec![vec![0.0; n]; n];
        for (e, row) in ids.iter().enumerate() {
            for (f, id) in row.iter().enumerate() {
                if let Some(i) = id {
                    w[e][f] = values[*i];
                }
            }
        }
        let members: Vec<usize> = if n <= EXACT_SEC_EDGES {
            match min_violated_subset(&w) {
                Some(mask) => (0..n).filter(|&e| mask >> e & 1 == 1).collect(),
                None => continue,
            }
        } else {
            let arcs: Vec<(usize, usize)> =
                (0..n).flat_map(|e| (0..n).map(move |f| (e, f))).filter(|&(e, f)| e != f && w[e][f] > 0.5).collect();
            match shortest_cycle(n, &arcs) {
                Some(mut c) => {
                    c.sort_unstable();
                    c
                }
                None => continue,
            }
        };
        let mut terms = Vec::new();
        for &e in &members {
            for &f in &members {
                if let Some(Some(id)) = ids.get(e).and_then(|r| r.get(f)) {
                    terms.push((VarId(*id), 1.0));
                }
            }
        }
        let tag_idx: Vec<(char, usize)> = std::iter::once(('g', g)).chain(members.iter().map(|&e| ('e', e))).collect();
        cuts.push(LinearConstraint {
            name: label("Sec", &tag_idx),
            tag: "Sec",
            terms,
            sense: Sense::Le,
            rhs: members.len() as f64 - 1.0,
        });
    }
    cuts
}
