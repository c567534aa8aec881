//! Small hand-checkable instances and solutions shared by unit tests.

use crate::geometry::Point;
use crate::instance::{Instance, TargetGraph, VisitMode};
use crate::solution::{EdgeVisit, Mode, Operation, Solution, Stage};

pub(crate) fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

pub(crate) fn two_edge_instance() -> Instance {
    crate::instance::tests::two_edge_instance()
}

/// One stage serving both edges of [`two_edge_instance`] at half coverage.
pub(crate) fn two_edge_solution() -> Solution {
    Solution {
        mode: Mode::Sync,
        origin: p(0.0, 0.0),
        destination: p(10.0, 0.0),
        stages: vec![Stage { launch: p(4.0, 0.0), retrieve: p(6.0, 0.0), inbound: 4.0, service: 2.0 }],
        closing: 4.0,
        operations: vec![Operation {
            graph: 0,
            drone: 0,
            launch_stage: 0,
            retrieve_stage: 0,
            visits: vec![
                EdgeVisit { edge: 0, rho: 0.5, lambda: 1.0, forward: true },
                EdgeVisit { edge: 1, rho: 0.0, lambda: 0.5, forward: true },
            ],
        }],
        objective: 10.0,
    }
}

/// Two single-edge graphs above the origin-destination line, full coverage.
pub(crate) fn two_graph_instance() -> Instance {
    let a = TargetGraph::new(0, vec![p(2.0, 1.0), p(3.0, 1.0)], &[(0, 1, 1.0)], 1.0);
    let b = TargetGraph::new(1, vec![p(7.0, 1.0), p(8.0, 1.0)], &[(0, 1, 1.0)], 1.0);
    Instance {
        origin: p(0.0, 0.0),
        destination: p(10.0, 0.0),
        graphs: vec![a, b],
        n_drones: 1,
        v_m: 1.0,
        v_d: 2.0,
        endurance: 10.0,
        visit_mode: VisitMode::PerEdge,
    }
}

pub(crate) fn two_graph_solution() -> Solution {
    let op = |graph, stage| Operation {
        graph,
        drone: 0,
        launch_stage: stage,
        retrieve_stage: stage,
        visits: vec![EdgeVisit { edge: 0, rho: 0.0, lambda: 1.0, forward: true }],
    };
    Solution {
        mode: Mode::Sync,
        origin: p(0.0, 0.0),
        destination: p(10.0, 0.0),
        stages: vec![
            Stage { launch: p(1.5, 0.0), retrieve: p(3.5, 0.0), inbound: 1.5, service: 2.0 },
            Stage { launch: p(6.5, 0.0), retrieve: p(8.5, 0.0), inbound: 3.0, service: 2.0 },
        ],
        closing: 1.5,
        operations: vec![op(0, 0), op(1, 1)],
        objective: 10.0,
    }
}
