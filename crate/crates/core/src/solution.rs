//! Routing solutions and their v1 text format.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::textfmt::*;

pub const SOLUTION_HEADER: &str = "ammdrpg-solution v1";

/// Whether drones must return within the stage they were launched in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Sync,
    Async,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Sync => "sync",
            Mode::Async => "async",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "sync" => Some(Mode::Sync),
            "async" => Some(Mode::Async),
            _ => None,
        }
    }
}

/// Traversal of one edge: the drone enters at parameter `rho` and leaves at `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeVisit {
    pub edge: usize,
    pub rho: f64,
    pub lambda: f64,
    /// `true` when the edge is traversed from its `from` node towards `to`.
    pub forward: bool,
}

/// One drone mission over one target graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    /// Index into `Instance::graphs`.
    pub graph: usize,
    /// 0-based drone index.
    pub drone: usize,
    pub launch_stage: usize,
    pub retrieve_stage: usize,
    /// Visited edges in traversal order.
    pub visits: Vec<EdgeVisit>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub launch: Point,
    pub retrieve: Point,
    /// Mothership path length from the previous retrieve point (or the origin) to `launch`.
    pub inbound: f64,
    /// Mothership path length from `launch` to `retrieve`.
    pub service: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub mode: Mode,
    pub origin: Point,
    pub destination: Point,
    pub stages: Vec<Stage>,
    /// Mothership path length from the last retrieve point (or the origin) to the destination.
    pub closing: f64,
    pub operations: Vec<Operation>,
    pub objective: f64,
}

impl Solution {
    /// Sum of all mothership path lengths.
    pub fn path_length(&self) -> f64 {
        self.stages.iter().map(|s| s.inbound + s.service).sum::<f64>() + self.closing
    }

    /// Mothership waypoints: origin, launch/retrieve pairs, destination.
    pub fn waypoints(&self) -> Vec<Point> {
        let mut pts = vec![self.origin];
        for s in &self.stages {
            pts.push(s.launch);
            pts.push(s.retrieve);
        }
        pts.push(self.destination);
        pts
    }
}

/// Serializes a solution to the v1 text format.
pub fn save_solution(sol: &Solution) -> String {
    let mut s = String::new();
    writeln!(s, "{SOLUTION_HEADER}").unwrap();
    writeln!(s, "mode = \"{}\"", sol.mode.as_str()).unwrap();
    writeln!(s, "origin = {}", point(sol.origin)).unwrap();
    writeln!(s, "destination = {}", point(sol.destination)).unwrap();
    writeln!(s, "closing = {}", num(sol.closing)).unwrap();
    writeln!(s, "objective = {}", num(sol.objective)).unwrap();
    for st in &sol.stages {
        writeln!(s, "\n[[stage]]").unwrap();
        writeln!(s, "launch = {}", point(st.launch)).unwrap();
        writeln!(s, "retrieve = {}", point(st.retrieve)).unwrap();
        writeln!(s, "inbound = {}", num(st.inbound)).unwrap();
        writeln!(s, "service = {}", num(st.service)).unwrap();
    }
    for op in &sol.operations {
        writeln!(s, "\n[[operation]]").unwrap();
        writeln!(s, "graph = {}", op.graph).unwrap();
        writeln!(s, "drone = {}", op.drone).unwrap();
        writeln!(s, "launch_stage = {}", op.launch_stage).unwrap();
        writeln!(s, "retrieve_stage = {}", op.retrieve_stage).unwrap();
        writeln!(s, "visits = [").unwrap();
        for v in &op.visits {
            writeln!(
                s,
                "  {{ edge = {}, rho = {}, lambda = {}, forward = {} }},",
                v.edge,
                num(v.rho),
                num(v.lambda),
                v.forward
            )
            .unwrap();
        }
        writeln!(s, "]").unwrap();
    }
    s
}

/// Parses a v1 solution document. Feasibility is not checked here.
pub fn load_solution(text: &str) -> Result<Solution> {
    let doc = parse_document(text, "ammdrpg-solution", "v1")?;
    let mode_s = as_str(get(&doc, "mode", "")?, "mode")?;
    let mode = Mode::parse(mode_s).ok_or_else(|| bad("mode", "\"sync\" or \"async\""))?;
    let origin = get_point(&doc, "origin", "")?;
    let destination = get_point(&doc, "destination", "")?;
    let closing = get_f64(&doc, "closing", "")?;
    let objective = get_f64(&doc, "objective", "")?;

    let mut stages = Vec::new();
    if let Some(list) = doc.get("stage") {
        for (i, v) in as_array(list, "stage")?.iter().enumerate() {
            let path = format!("stage[{i}]");
            let t = as_table(v, &path)?;
            stages.push(Stage {
                launch: get_point(t, "launch", &path)?,
                retrieve: get_point(t, "retrieve", &path)?,
                inbound: get_f64(t, "inbound", &path)?,
                service: get_f64(t, "service", &path)?,
            });
        }
    }
    let mut operations = Vec::new();
    if let Some(list) = doc.get("operation") {
        for (i, v) in as_array(list, "operation")?.iter().enumerate() {
            let path = format!("operation[{i}]");
            let t = as_table(v, &path)?;
            let mut visits = Vec::new();
            for (k, vv) in get_array(t, "visits", &path)?.iter().enumerate() {
                let vp = format!("{path}.visits[{k}]");
                let vt = as_table(vv, &vp)?;
                visits.push(EdgeVisit {
                    edge: get_usize(vt, "edge", &vp)?,
                    rho: get_f64(vt, "rho", &vp)?,
                    lambda: get_f64(vt, "lambda", &vp)?,
                    forward: as_bool(get(vt, "forward", &vp)?, &join(&vp, "forward"))?,
                });
            }
            operations.push(Operation {
                graph: get_usize(t, "graph", &path)?,
                drone: get_usize(t, "drone", &path)?,
                launch_stage: get_usize(t, "launch_stage", &path)?,
                retrieve_stage: get_usize(t, "retrieve_stage", &path)?,
                visits,
            });
        }
    }
    for (i, op) in operations.iter().enumerate() {
        if op.launch_stage >= stages.len() || op.retrieve_stage >= stages.len() {
            return Err(Error::Parse { path: format!("operation[{i}]"), message: "stage index out of range".into() });
        }
    }
    Ok(Solution { mode, origin, destination, stages, closing, operations, objective })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn sample_solution() -> Solution {
        Solution {
            mode: Mode::Sync,
            origin: Point::new(0.0, 0.0),
            destination: Point::new(10.0, 0.0),
            stages: vec![Stage { launch: Point::new(3.0, 0.0), retrieve: Point::new(6.0, 0.0), inbound: 3.0, service: 3.0 }],
            closing: 4.0,
            operations: vec![Operation {
                graph: 0,
                drone: 0,
                launch_stage: 0,
                retrieve_stage: 0,
                visits: vec![EdgeVisit { edge: 0, rho: 0.0, lambda: 0.5, forward: true }],
            }],
            objective: 10.0,
        }
    }

    #[test]
    fn round_trip_sample() {
        let s = sample_solution();
        let text = save_solution(&s);
        assert!(text.starts_with("ammdrpg-solution v1\n"));
        assert_eq!(load_solution(&text).unwrap(), s);
        assert_eq!(s.path_length(), 10.0);
    }

    #[test]
    fn stage_index_checked() {
        let mut s = sample_solution();
        s.operations[0].retrieve_stage = 3;
        let err = load_solution(&save_solution(&s)).unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "operation[0]"));
    }

    #[test]
    fn wrong_kind_rejected() {
        assert!(matches!(load_solution("ammdrpg-instance v1\n"), Err(Error::Parse { .. })));
        assert!(matches!(load_solution("ammdrpg-solution v9\n"), Err(Error::UnknownVersion(_))));
    }

    proptest! {
        #[test]
        fn round_trip_random(xs in proptest::collection::vec(-1e6f64..1e6, 8), r in 0.0f64..1.0, fw: bool) {
            let mut s = sample_solution();
            s.stages[0].launch = Point::new(xs[0], xs[1]);
            s.stages[0].retrieve = Point::new(xs[2], xs[3]);
            s.stages[0].inbound = xs[4].abs();
            s.closing = xs[5].abs();
            s.objective = xs[6].abs() / 3.0;
            s.operations[0].visits[0].rho = r;
            s.operations[0].visits[0].forward = fw;
            let text = save_solution(&s);
            let back = load_solution(&text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(save_solution(&back), text);
        }
    }
}
