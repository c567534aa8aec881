use std::collections::HashSet;

use super::*;
use crate::fixtures::*;

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

fn binomial(n: usize, k: usize) -> usize {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Visited subsets of size k, each in k! orders and 2^k directions.
fn route_census(n_free: usize, n_required: usize) -> usize {
    (0..=n_free)
        .map(|j| {
            let k = j + n_required;
            if k == 0 {
                0
            } else {
                binomial(n_free, j) * factorial(k) * (1 << k)
            }
        })
        .sum()
}

fn chain(n_edges: usize, alpha: f64, mode: VisitMode) -> Instance {
    let nodes: Vec<_> = (0..=n_edges).map(|k| p(4.0 + k as f64, 1.0 + (k % 2) as f64)).collect();
    let edges: Vec<_> = (0..n_edges).map(|k| (k, k + 1, alpha)).collect();
    let g = TargetGraph::new(0, nodes, &edges, alpha);
    Instance { graphs: vec![g], visit_mode: mode, ..two_edge_instance() }
}

fn crossing(v_d: f64, endurance: f64) -> Instance {
    let g = TargetGraph::new(0, vec![p(10.0, -1.0), p(10.0, 1.0)], &[(0, 1, 1.0)], 1.0);
    Instance {
        origin: p(0.0, 0.0),
        destination: p(20.0, 0.0),
        graphs: vec![g],
        n_drones: 1,
        v_m: 1.0,
        v_d,
        endurance,
        visit_mode: VisitMode::PerEdge,
    }
}

#[test]
fn single_edge_has_two_skeletons() {
    let inst = chain(1, 0.5, VisitMode::PerEdge);
    assert_eq!(enumerate_skeletons(&inst, Mode::Sync, &Limits::default()).unwrap().len(), 2);
}

#[test]
fn whole_graph_census() {
    for n in 1..=3 {
        let inst = chain(n, 0.1, VisitMode::WholeGraph);
        let got = enumerate_skeletons(&inst, Mode::Sync, &Limits::default()).unwrap();
        assert_eq!(got.len(), route_census(n, 0), "{n} edges");
        let unique: HashSet<_> = got.iter().cloned().collect();
        assert_eq!(unique.len(), got.len());
    }
    assert_eq!(route_census(2, 0), 12);
}

#[test]
fn optional_edges_census() {
    let mut inst = chain(3, 0.5, VisitMode::PerEdge);
    let g = &inst.graphs[0];
    inst.graphs[0] = TargetGraph::new(0, g.nodes.clone(), &[(0, 1, 0.5), (1, 2, 0.0), (2, 3, 0.0)], 0.5);
    let got = enumerate_skeletons(&inst, Mode::Sync, &Limits::default()).unwrap();
    assert_eq!(got.len(), route_census(2, 1));
}

#[test]
fn empty_instance_has_one_skeleton() {
    let inst = Instance { graphs: vec![], ..two_edge_instance() };
    let s = enumerate_skeletons(&inst, Mode::Sync, &Limits::default()).unwrap();
    assert_eq!(s.len(), 1);
    assert!(s[0].visits.is_empty());
    let r = solve_exact(&inst, Mode::Sync, &Limits::default(), &SolveOptions::default()).unwrap();
    assert!((r.solution.objective - 10.0).abs() < 1e-6);
}

#[test]
fn stage_pattern_counts() {
    // ordered partitions of two graphs: together (needs two drones) or in either order
    assert_eq!(sync_patterns(2, 2).len(), 3);
    assert_eq!(sync_patterns(2, 1).len(), 2);
    assert_eq!(sync_patterns(1, 2).len(), 1);
    // three graphs, unbounded blocks: ordered Bell number 13
    assert_eq!(sync_patterns(3, 3).len(), 13);
}

#[test]
fn async_patterns_contain_sync_ones() {
    for d in 1..=2 {
        let s: HashSet<_> = sync_patterns(2, d).into_iter().collect();
        let a: HashSet<_> = async_patterns(2, d).into_iter().collect();
        assert!(s.is_subset(&a), "{d} drones");
        assert!(a.len() > s.len() || d == 1);
    }
    // one drone, two graphs: the missions cannot overlap
    let a = async_patterns(2, 1);
    assert_eq!(a.len(), 2);
}

#[test]
fn limits_enforced() {
    let inst = chain(4, 0.5, VisitMode::PerEdge);
    assert!(matches!(enumerate_skeletons(&inst, Mode::Sync, &Limits::default()), Err(Error::LimitsExceeded(_))));
    let inst = two_edge_instance().with_drones(3);
    assert!(matches!(enumerate_skeletons(&inst, Mode::Sync, &Limits::default()), Err(Error::LimitsExceeded(_))));
}

#[test]
fn degenerate_instance_costs_nothing() {
    let g = TargetGraph::new(0, vec![p(0.0, 0.0), p(0.0, 0.0)], &[(0, 1, 1.0)], 1.0);
    let inst = Instance { origin: p(0.0, 0.0), destination: p(0.0, 0.0), graphs: vec![g], ..two_edge_instance() };
    let r = solve_exact(&inst, Mode::Sync, &Limits::default(), &SolveOptions::default()).unwrap();
    assert!(r.solution.objective.abs() < 1e-6);
    assert!(grid_oracle(&inst, 0.02).unwrap().value.abs() < 1e-12);
}

#[test]
fn exact_matches_oracle_on_crossing_edge() {
    for v_d in [2.0, 0.5] {
        let inst = crossing(v_d, 100.0);
        let oracle = grid_oracle(&inst, 0.02).unwrap().value;
        let exact = solve_exact(&inst, Mode::Sync, &Limits::default(), &SolveOptions::default()).unwrap();
        assert!(exact.solution.objective <= oracle + 1e-6, "{} vs {oracle}", exact.solution.objective);
        assert!((oracle - exact.solution.objective).abs() <= 1e-3 * oracle.max(1.0), "{} vs {oracle}", exact.solution.objective);
        assert!(crate::validate::check_solution(&inst, &exact.solution, 1e-6).passed());
    }
}

#[test]
fn too_little_endurance() {
    let inst = crossing(2.0, 0.9);
    assert!(matches!(solve_exact(&inst, Mode::Sync, &Limits::default(), &SolveOptions::default()), Err(Error::Infeasible(_))));
    assert!(matches!(grid_oracle(&inst, 0.05), Err(Error::Infeasible(_))));
}

#[test]
fn async_not_worse_than_sync() {
    let inst = two_graph_instance().with_drones(2);
    let mut inst = inst;
    inst.v_d = 0.8;
    let s = solve_exact(&inst, Mode::Sync, &Limits::default(), &SolveOptions::default()).unwrap();
    let a = solve_exact(&inst, Mode::Async, &Limits::default(), &SolveOptions::default()).unwrap();
    assert!(a.solution.objective <= s.solution.objective + 1e-6);
    assert!(a.skeletons > s.skeletons);
}

#[test]
fn oracle_bounds_and_refinement() {
    let inst = two_edge_instance();
    let coarse = grid_oracle(&inst, 0.1).unwrap().value;
    let fine = grid_oracle(&inst, 0.05).unwrap().value;
    assert!(coarse >= 10.0 - 0.1 && fine >= 10.0 - 0.05);
    assert!(fine <= coarse + 0.1 * 10.0);
    assert!(matches!(grid_oracle(&chain(3, 0.5, VisitMode::PerEdge), 0.1), Err(Error::LimitsExceeded(_))));
}
