//! Instance data model, grid-graph generator and the versioned text format.

mod generator;
mod io;

pub use generator::{generate_grid_instance, GridParams, NODE_COUNT_MIX};
pub use io::{load_instance, save_instance, INSTANCE_HEADER};

use crate::geometry::{dist, BBox, Point, Segment};

/// How the coverage requirement of a target graph is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VisitMode {
    /// A fraction `alpha` of every edge must be traversed.
    PerEdge,
    /// A fraction `alpha` of the total graph length must be traversed.
    WholeGraph,
}

impl VisitMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            VisitMode::PerEdge => "edge",
            VisitMode::WholeGraph => "graph",
        }
    }

    pub fn parse(s: &str) -> Option<VisitMode> {
        match s {
            "edge" => Some(VisitMode::PerEdge),
            "graph" => Some(VisitMode::WholeGraph),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetEdge {
    /// Index of the edge inside its graph.
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub segment: Segment,
    /// Required fraction of this edge (per-edge mode only).
    pub alpha: f64,
}

impl TargetEdge {
    pub fn length(&self) -> f64 {
        self.segment.length()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetGraph {
    pub id: usize,
    pub nodes: Vec<Point>,
    pub edges: Vec<TargetEdge>,
    /// Required fraction of the total length (whole-graph mode only).
    pub alpha: f64,
}

impl TargetGraph {
    /// Builds a graph from node coordinates and `(from, to, alpha)` triples.
    /// Edge segments are derived from the node list; invalid node indices
    /// produce a degenerate segment at the origin and are reported by
    /// [`validate_instance`].
    pub fn new(id: usize, nodes: Vec<Point>, edges: &[(usize, usize, f64)], alpha: f64) -> Self {
        let edges = edges
            .iter()
            .enumerate()
            .map(|(k, &(from, to, a))| {
                let b = nodes.get(from).copied().unwrap_or_default();
                let c = nodes.get(to).copied().unwrap_or_default();
                TargetEdge { id: k, from, to, segment: Segment::new(b, c), alpha: a }
            })
            .collect();
        TargetGraph { id, nodes, edges, alpha }
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(TargetEdge::length).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        // only nodes touched by an edge must be connected; isolated nodes are
        // allowed only when the graph has a single node
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            if e.from >= self.nodes.len() || e.to >= self.nodes.len() {
                return false;
            }
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (1..self.nodes.len()).all(|k| find(&mut parent, k) == root)
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::enclosing(self.nodes.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub origin: Point,
    pub destination: Point,
    pub graphs: Vec<TargetGraph>,
    pub n_drones: usize,
    /// Mothership speed.
    pub v_m: f64,
    /// Drone speed.
    pub v_d: f64,
    /// Maximum drone flight time between launch and retrieval.
    pub endurance: f64,
    pub visit_mode: VisitMode,
}

impl Instance {
    /// Every graph vertex plus origin and destination.
    pub fn all_points(&self) -> impl Iterator<Item = Point> + '_ {
        [self.origin, self.destination]
            .into_iter()
            .chain(self.graphs.iter().flat_map(|g| g.nodes.iter().copied()))
    }

    pub fn bbox(&self) -> BBox {
        BBox::enclosing(self.all_points()).expect("origin is always present")
    }

    /// Largest distance between any two points of [`Instance::all_points`].
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point> = self.all_points().collect();
        let mut best = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                best = best.max(dist(*p, *q));
            }
        }
        best
    }

    pub fn total_edges(&self) -> usize {
        self.graphs.iter().map(|g| g.edges.len()).sum()
    }

    /// Same instance with another fleet size.
    pub fn with_drones(&self, n: usize) -> Instance {
        Instance { n_drones: n, ..self.clone() }
    }

    /// Same instance with another endurance.
    pub fn with_endurance(&self, endurance: f64) -> Instance {
        Instance { endurance, ..self.clone() }
    }
}

/// Machine-readable violation codes returned by [`validate_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    NonFinite,
    NonPositiveSpeed,
    NonPositiveEndurance,
    EmptyFleet,
    DuplicateGraphId,
    AlphaOutOfRange,
    DanglingEdge,
    SelfLoop,
    ZeroLengthEdge,
    ZeroLengthGraph,
    Disconnected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Field path, e.g. `graph[1].edge[0]`.
    pub location: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at {}", self.code, self.location)
    }
}

/// Checks every structural invariant of an instance; empty iff valid.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, location: String| out.push(Violation { code, location });

    if !inst.origin.is_finite() {
        push(ViolationCode::NonFinite, "origin".into());
    }
    if !inst.destination.is_finite() {
        push(ViolationCode::NonFinite, "destination".into());
    }
    if !(inst.v_m > 0.0 && inst.v_m.is_finite()) {
        push(ViolationCode::NonPositiveSpeed, "fleet.v_m".into());
    }
    if !(inst.v_d > 0.0 && inst.v_d.is_finite()) {
        push(ViolationCode::NonPositiveSpeed, "fleet.v_d".into());
    }
    if !(inst.endurance > 0.0 && inst.endurance.is_finite()) {
        push(ViolationCode::NonPositiveEndurance, "fleet.endurance".into());
    }
    if inst.n_drones == 0 {
        push(ViolationCode::EmptyFleet, "fleet.drones".into());
    }
    let mut seen = std::collections::BTreeSet::new();
    for (gi, g) in inst.graphs.iter().enumerate() {
        let loc = format!("graph[{gi}]");
        if !seen.insert(g.id) {
            push(ViolationCode::DuplicateGraphId, format!("{loc}.id"));
        }
        if !(0.0..=1.0).contains(&g.alpha) {
            push(ViolationCode::AlphaOutOfRange, format!("{loc}.alpha"));
        }
        for (ni, p) in g.nodes.iter().enumerate() {
            if !p.is_finite() {
                push(ViolationCode::NonFinite, format!("{loc}.node[{ni}]"));
            }
        }
        let mut dangling = false;
        for (ei, e) in g.edges.iter().enumerate() {
            let eloc = format!("{loc}.edge[{ei}]");
            if e.from >= g.nodes.len() || e.to >= g.nodes.len() {
                push(ViolationCode::DanglingEdge, eloc);
                dangling = true;
                continue;
            }
            if e.from == e.to {
                push(ViolationCode::SelfLoop, eloc.clone());
            } else if !(e.length() > 0.0) {
                push(ViolationCode::ZeroLengthEdge, eloc.clone());
            }
            if !(0.0..=1.0).contains(&e.alpha) {
                push(ViolationCode::AlphaOutOfRange, format!("{eloc}.alpha"));
            }
        }
        if !(g.total_length() > 0.0) {
            push(ViolationCode::ZeroLengthGraph, loc.clone());
        }
        if !dangling && !g.is_connected() {
            push(ViolationCode::Disconnected, loc);
        }
    }
    out
}
