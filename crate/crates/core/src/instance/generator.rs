use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, TargetGraph, VisitMode};
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point};

/// Node counts assigned to graphs in id order, cycling when the number of
/// graphs is not a multiple of five.
pub const NODE_COUNT_MIX: [usize; 5] = [4, 6, 8, 10, 12];

#[derive(Debug, Clone)]
pub struct GridParams {
    pub seed: u64,
    pub n_graphs: usize,
    pub bbox: BBox,
    pub n_drones: usize,
    pub endurance: f64,
    pub visit_mode: VisitMode,
    /// Mothership speed; drones fly twice as fast.
    pub v_m: f64,
    /// Minimum width and height of the cell hosting one graph.
    pub min_cell: f64,
    /// Range of the graph's size relative to the usable part of its cell.
    pub graph_scale: (f64, f64),
}

impl GridParams {
    pub fn new(seed: u64, n_graphs: usize, n_drones: usize, endurance: f64, visit_mode: VisitMode) -> Self {
        GridParams {
            seed,
            n_graphs,
            bbox: BBox::new(Point::new(0.0, 0.0), Point::new(100.0, 100.0)),
            n_drones,
            endurance,
            visit_mode,
            v_m: 1.0,
            min_cell: 1.0,
            graph_scale: (0.08, 0.16),
        }
    }
}

fn grid_shape(nodes: usize) -> (usize, usize) {
    match nodes {
        4 => (2, 2),
        6 => (3, 2),
        8 => (4, 2),
        10 => (5, 2),
        12 => (4, 3),
        n => (n, 1),
    }
}

/// Generates a random grid-graph instance. Deterministic in `params`.
pub fn generate_grid_instance(params: &GridParams) -> Result<Instance> {
    if params.n_graphs == 0 {
        return Err(Error::InvalidParams("n_graphs must be positive".into()));
    }
    if params.bbox.is_degenerate() {
        return Err(Error::InvalidParams("bounding box is degenerate".into()));
    }
    let (lo, hi) = params.graph_scale;
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(Error::InvalidParams("graph scale must satisfy 0 < lo <= hi <= 1".into()));
    }
    if !(params.v_m > 0.0) || !(params.endurance > 0.0) || params.n_drones == 0 {
        return Err(Error::InvalidParams("speeds, endurance and fleet size must be positive".into()));
    }
    let cols = (params.n_graphs as f64).sqrt().ceil() as usize;
    let rows = params.n_graphs.div_ceil(cols);
    let cell_w = params.bbox.width() / cols as f64;
    let cell_h = params.bbox.height() / rows as f64;
    if cell_w < params.min_cell || cell_h < params.min_cell {
        return Err(Error::BBoxTooSmall { n_graphs: params.n_graphs });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut graphs = Vec::with_capacity(params.n_graphs);
    for id in 0..params.n_graphs {
        let (cx, cy) = (id % cols, id / cols);
        let cell_min = Point::new(
            params.bbox.min.x + cx as f64 * cell_w,
            params.bbox.min.y + cy as f64 * cell_h,
        );
        let n_nodes = NODE_COUNT_MIX[id % NODE_COUNT_MIX.len()];
        graphs.push(grid_graph(&mut rng, id, n_nodes, cell_min, cell_w, cell_h, params.graph_scale));
    }

    Ok(Instance {
        origin: params.bbox.min,
        destination: Point::new(params.bbox.max.x, params.bbox.min.y),
        graphs,
        n_drones: params.n_drones,
        v_m: params.v_m,
        v_d: 2.0 * params.v_m,
        endurance: params.endurance,
        visit_mode: params.visit_mode,
    })
}

fn unit_fraction(rng: &mut ChaCha8Rng) -> f64 {
    // gen() is in [0, 1); flip it into (0, 1]
    1.0 - rng.gen::<f64>()
}

fn grid_graph(
    rng: &mut ChaCha8Rng,
    id: usize,
    n_nodes: usize,
    cell_min: Point,
    cell_w: f64,
    cell_h: f64,
    scale: (f64, f64),
) -> TargetGraph {
    let (nx, ny) = grid_shape(n_nodes);
    // the graph occupies a random sub-rectangle strictly inside the cell
    let margin = 0.15;
    let scale = rng.gen_range(scale.0..=scale.1);
    let inner_w = cell_w * (1.0 - 2.0 * margin) * scale;
    let inner_h = cell_h * (1.0 - 2.0 * margin) * scale;
    let slack_x = cell_w * (1.0 - 2.0 * margin) - inner_w;
    let slack_y = cell_h * (1.0 - 2.0 * margin) - inner_h;
    let ox = cell_min.x + cell_w * margin + rng.gen::<f64>() * slack_x;
    let oy = cell_min.y + cell_h * margin + rng.gen::<f64>() * slack_y;
    let step_x = inner_w / (nx.max(2) - 1) as f64;
    let step_y = if ny > 1 { inner_h / (ny - 1) as f64 } else { 0.0 };

    let mut nodes = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            nodes.push(Point::new(ox + i as f64 * step_x, oy + j as f64 * step_y));
        }
    }
    let idx = |i: usize, j: usize| j * nx + i;
    let mut candidates = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                candidates.push((idx(i, j), idx(i + 1, j)));
            }
            if j + 1 < ny {
                candidates.push((idx(i, j), idx(i, j + 1)));
            }
        }
    }
    candidates.shuffle(rng);

    // random spanning tree (Kruskal over shuffled edges), extra edges kept with probability 1/2
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut chosen = Vec::new();
    let mut extra = Vec::new();
    for (a, b) in candidates {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            chosen.push((a, b));
        } else {
            extra.push((a, b));
        }
    }
    for e in extra {
        if rng.gen_bool(0.5) {
            chosen.push(e);
        }
    }
    chosen.sort_unstable();
    let edges: Vec<(usize, usize, f64)> = chosen.into_iter().map(|(a, b)| (a, b, unit_fraction(rng))).collect();
    let alpha = unit_fraction(rng);
    TargetGraph::new(id, nodes, &edges, alpha)
}
