use crate::geometry::{dist, Segment};
use crate::instance::Instance;

/// Bounds on the distance variables that appear in products with binaries.
#[derive(Debug, Clone, PartialEq)]
pub struct BigMTable {
    /// Upper bound on the launch-point-to-edge distance.
    pub m_launch: f64,
    /// Upper bound on the edge-to-retrieve-point distance.
    pub m_retrieve: f64,
    /// `m_pair[g][e][e2]`: upper bound on the jump from edge `e` to `e2`.
    pub m_pair: Vec<Vec<Vec<f64>>>,
    /// `m_pair_lo[g][e][e2]`: lower bound on the same jump.
    pub m_pair_lo: Vec<Vec<Vec<f64>>>,
    /// Slack that deactivates the drone-timing row of graph `g`.
    pub m_op: Vec<f64>,
}

fn pair_bounds(a: &Segment, b: &Segment) -> (f64, f64) {
    let hi = [dist(a.b, b.b), dist(a.b, b.c), dist(a.c, b.b), dist(a.c, b.c)].into_iter().fold(0.0, f64::max);
    (a.dist_to_segment(b), hi)
}

pub fn big_m_bounds(inst: &Instance) -> BigMTable {
    let diameter = inst.diameter();
    let mut m_pair = Vec::new();
    let mut m_pair_lo = Vec::new();
    let mut m_op = Vec::new();
    for g in &inst.graphs {
        let n = g.edges.len();
        let mut hi = vec![vec![0.0; n]; n];
        let mut lo = vec![vec![0.0; n]; n];
        let mut jumps = 0.0;
        for (i, a) in g.edges.iter().enumerate() {
            for (j, b) in g.edges.iter().enumerate() {
                if i != j {
                    let (l, h) = pair_bounds(&a.segment, &b.segment);
                    lo[i][j] = l;
                    hi[i][j] = h;
                    jumps += h;
                }
            }
        }
        m_op.push(g.total_length() + 2.0 * diameter + jumps);
        m_pair.push(hi);
        m_pair_lo.push(lo);
    }
    BigMTable { m_launch: diameter, m_retrieve: diameter, m_pair, m_pair_lo, m_op }
}
