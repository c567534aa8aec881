//! Acceptance gate: one line per criterion, then an assertion that all passed.

use std::io::Write;
use std::time::{Duration, Instant};

use ammdrpg::convex_sub::{solve_fixed, Init, SolveOptions};
use ammdrpg::exact::{enumerate_skeletons, grid_oracle, solve_exact, Limits};
use ammdrpg::instance::{generate_grid_instance, load_instance, save_instance, GridParams};
use ammdrpg::model_ir::{mccormick_rows, parse_lp_census, separate_sec, Sense, VarId};
use ammdrpg::solution::{load_solution, save_solution};
use ammdrpg::validate::{check_sync_reducible, ReducibilityInput};
use ammdrpg::{
    build_model, check_solution, dist, emit_lp, run_matheuristic, EdgeVisit, Instance, MatheuristicParams, Mode, ModelOptions,
    Operation, Point, Solution, Stage, Subtour, TargetGraph, VisitMode,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
/// Tiny instances along the x axis: 1-2 graphs of 1-2 edges, 1-2 drones.
fn suite() -> Vec<Instance> {
    (0..20u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let len = rng.gen_range(6.0..10.0);
            let n_graphs = rng.gen_range(1..=2);
            let graphs = (0..n_graphs)
                .map(|id| {
                    let slot = (id as f64 + 0.5) / n_graphs as f64;
                    let cx = 1.0 + slot * (len - 2.0) + rng.gen_range(-0.5..0.5);
                    let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    let cy = side * rng.gen_range(0.5..3.0);
                    let n_edges = rng.gen_range(1..=2);
                    let mut nodes = vec![Point::new(cx, cy)];
                    for _ in 0..n_edges {
                        let last = *nodes.last().unwrap();
                        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                        let l = rng.gen_range(0.5..1.5);
                        nodes.push(Point::new(last.x + l * a.cos(), last.y + l * a.sin()));
                    }
                    let edges: Vec<_> = (0..n_edges).map(|k| (k, k + 1, rng.gen_range(0.2..1.0))).collect();
                    TargetGraph::new(id, nodes, &edges, rng.gen_range(0.2..1.0))
                })
                .collect();
            Instance {
                origin: Point::new(0.0, 0.0),
                destination: Point::new(len, 0.0),
                graphs,
                n_drones: rng.gen_range(1..=2),
                v_m: 1.0,
                v_d: 2.0,
                endurance: rng.gen_range(2.5..6.0),
                visit_mode: if seed % 2 == 0 { VisitMode::PerEdge } else { VisitMode::WholeGraph },
            }
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn exact_value(inst: &Instance, mode: Mode, limits: &Limits) -> Option<f64> {
    solve_exact(inst, mode, limits, &SolveOptions::default()).ok().map(|r| r.solution.objective)
}

fn exact_matches_oracle(suite: &[Instance]) -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for (i, inst) in suite.iter().enumerate() {
        let t = Instant::now();
        let ex = exact_value(inst, Mode::Sync, &Limits::default());
        slowest = slowest.max(t.elapsed());
        let or = grid_oracle(inst, 0.02).ok().map(|r| r.value);
        match (ex, or) {
            (Some(a), Some(b)) => {
                let gap = (a - b).abs();
                worst = worst.max(gap / b.abs().max(1e-12));
                if gap > (0.01 * b.abs()).max(1e-3) {
                    failures.push(format!("#{i} exact {a:.6} oracle {b:.6}"));
                }
            }
            (None, None) => {}
            (a, b) => failures.push(format!("#{i} exact {a:?} oracle {b:?}")),
        }
    }
    let slow = slowest >= Duration::from_secs(60);
    outcome(
        failures.is_empty() && !slow,
        format!("worst relative gap {worst:.2e}, slowest exact {slowest:.2?} {}", failures.join("; ")),
    )
}

fn matheuristic_is_feasible_and_bounded(suite: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut solved = 0;
    for (i, inst) in suite.iter().enumerate() {
        let Ok(res) = run_matheuristic(inst, &MatheuristicParams::default()) else { continue };
        solved += 1;
        let report = check_solution(inst, &res.solution, 1e-6);
        if !report.passed() {
            failures.push(format!("#{i} infeasible ({:.2e})", report.max_residual()));
        }
        match exact_value(inst, Mode::Sync, &Limits::default()) {
            Some(ex) if res.solution.objective < ex - 1e-6 => {
                failures.push(format!("#{i} heuristic {:.6} below exact {ex:.6}", res.solution.objective))
            }
            None => failures.push(format!("#{i} heuristic solved what exact could not")),
            _ => {}
        }
    }
    outcome(failures.is_empty() && solved > 0, format!("{solved} solved {}", failures.join("; ")))
}

fn async_no_worse_than_sync(suite: &[Instance]) -> Outcome {
    let mut failures = Vec::new();
    let mut compared = 0;
    for (i, inst) in suite.iter().enumerate() {
        let sync = exact_value(inst, Mode::Sync, &Limits::default());
        let asy = exact_value(inst, Mode::Async, &Limits::default());
        match (sync, asy) {
            (Some(s), Some(a)) => {
                compared += 1;
                if a > s + 1e-6 {
                    failures.push(format!("#{i} async {a:.6} sync {s:.6}"));
                }
            }
            (Some(_), None) => failures.push(format!("#{i} async infeasible where sync is feasible")),
            _ => {}
        }
    }
    outcome(failures.is_empty() && compared > 0, format!("{compared} compared {}", failures.join("; ")))
}

fn objective_monotone_in_fleet_and_endurance() -> Outcome {
    let graph = |id: usize, x: f64, y: f64| TargetGraph::new(id, vec![Point::new(x, y), Point::new(x + 1.0, y + 0.5)], &[(0, 1, 0.6)], 0.6);
    let base = Instance {
        origin: Point::new(0.0, 0.0),
        destination: Point::new(10.0, 0.0),
        graphs: vec![graph(0, 4.0, 3.0), graph(1, 4.0, 3.3)],
        n_drones: 1,
        v_m: 1.0,
        v_d: 2.0,
        endurance: 1.0,
        visit_mode: VisitMode::PerEdge,
    };
    let limits = Limits { max_drones: 3, ..Limits::default() };
    let (mut lo, mut hi) = (0.0, 1.0);
    while exact_value(&base.with_endurance(hi), Mode::Sync, &limits).is_none() {
        hi *= 2.0;
        if hi > 1e4 {
            return outcome(false, "no feasible endurance found");
        }
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if exact_value(&base.with_endurance(mid), Mode::Sync, &limits).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tight = hi * 1.01;
    let endurances = [tight, 1.25 * tight, 1.5 * tight, 2.0 * tight];
    let mut table = Vec::new();
    for drones in 1..=3 {
        let row: Vec<f64> = endurances
            .iter()
            .map(|&e| exact_value(&base.with_drones(drones).with_endurance(e), Mode::Sync, &limits).unwrap_or(f64::INFINITY))
            .collect();
        table.push(row);
    }
    let mut ok = table.iter().flatten().all(|v| v.is_finite());
    for r in 0..3 {
        for c in 0..4 {
            if c > 0 && table[r][c] > table[r][c - 1] + 1e-6 {
                ok = false;
            }
            if r > 0 && table[r][c] > table[r - 1][c] + 1e-6 {
                ok = false;
            }
        }
    }
    let rows: Vec<String> = table.iter().map(|r| r.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" ")).collect();
    outcome(ok, format!("tight endurance {tight:.4}; {}", rows.join(" | ")))
}

fn mccormick_is_exact_at_binaries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let lo = rng.gen_range(-50.0..50.0);
        let hi = lo + rng.gen_range(0.0..100.0);
        let d = rng.gen_range(lo..=hi);
        let b = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
        // each row reads coeff_p * p + coeff_b * b + coeff_d * d (sense) rhs; solve it for p
        let (mut p_lo, mut p_hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (c, sense, rhs) in mccormick_rows(lo, hi) {
            let bound = (rhs - c[1] * b - c[2] * d) / c[0];
            match sense {
                Sense::Le => p_hi = p_hi.min(bound),
                Sense::Ge => p_lo = p_lo.max(bound),
                Sense::Eq => {
                    p_lo = p_lo.max(bound);
                    p_hi = p_hi.min(bound);
                }
            }
        }
        let scale = 1.0 + lo.abs().max(hi.abs());
        worst = worst.max((p_lo - b * d).abs() / scale).max((p_hi - b * d).abs() / scale);
    }
    outcome(worst <= 1e-12, format!("worst scaled deviation {worst:.2e} over 10000 samples"))
}

/// Least cardinality of an edge subset whose arcs exceed its size minus one.
fn brute_min_violated(n: usize, arcs: &[(usize, usize)]) -> Option<usize> {
    (1u32..1 << n)
        .filter(|m| arcs.iter().filter(|a| m >> a.0 & 1 == 1 && m >> a.1 & 1 == 1).count() + 1 > m.count_ones() as usize)
        .map(|m| m.count_ones() as usize)
        .min()
}

fn sec_separation_is_exact() -> Outcome {
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for n in 1..=5usize {
        let graph = TargetGraph::new(
            0,
            (0..=n).map(|i| Point::new(2.0 + 0.7 * i as f64, 1.0 + 0.4 * (i % 2) as f64)).collect(),
            &(0..n).map(|i| (i, i + 1, 0.5)).collect::<Vec<_>>(),
            0.5,
        );
        let inst = Instance {
            origin: Point::new(0.0, 0.0),
            destination: Point::new(10.0, 0.0),
            graphs: vec![graph],
            n_drones: 1,
            v_m: 1.0,
            v_d: 2.0,
            endurance: 5.0,
            visit_mode: VisitMode::PerEdge,
        };
        let model = build_model(&inst, &ModelOptions { subtour: Subtour::Sec, ..Default::default() });
        let zs: Vec<(VarId, usize, usize)> = (0..n)
            .flat_map(|e| (0..n).map(move |f| (e, f)))
            .filter(|(e, f)| e != f)
            .map(|(e, f)| (model.var_by_name(&format!("z_g0_e{e}_f{f}")).expect("order variable"), e, f))
            .collect();
        let bad: Vec<String> = (0u32..1 << zs.len())
            .into_par_iter()
            .filter_map(|mask| {
                let mut x = vec![0.0; model.variables.len()];
                let mut arcs = Vec::new();
                for (k, z) in zs.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        x[z.0 .0] = 1.0;
                        arcs.push((z.1, z.2));
                    }
                }
                let cuts = separate_sec(&model, &x);
                let got = cuts.first().map(|c| (c.rhs as usize + 1, c.violation(&x)));
                let want = brute_min_violated(n, &arcs);
                let ok = match (got, want) {
                    (None, None) => true,
                    (Some((k, viol)), Some(w)) => k == w && viol > 0.5,
                    _ => false,
                };
                (!ok).then(|| format!("n={n} arcs {arcs:?}: got {got:?} want {want:?}"))
            })
            .collect();
        checked += 1 << zs.len();
        failures.extend(bad.into_iter().take(3));
    }
    outcome(failures.is_empty(), format!("{checked} assignments {}", failures.join("; ")))
}

fn lp_emission_is_stable() -> Outcome {
    let graph = TargetGraph::new(0, vec![Point::new(2.0, 1.0), Point::new(2.7, 1.4), Point::new(3.4, 1.0)], &[(0, 1, 0.5), (1, 2, 0.5)], 0.5);
    let smallest = Instance {
        origin: Point::new(0.0, 0.0),
        destination: Point::new(6.0, 0.0),
        graphs: vec![graph],
        n_drones: 1,
        v_m: 1.0,
        v_d: 2.0,
        endurance: 5.0,
        visit_mode: VisitMode::PerEdge,
    };
    let m = build_model(&smallest, &ModelOptions::default());
    let census = (m.variables.len(), m.linear.len(), m.soc.len());
    let mut ok = census == (61, 77, 11);
    let text = emit_lp(&m);
    ok &= match parse_lp_census(&text) {
        Ok(c) => c.variables == 61 + 22 && c.linear_rows == 77 + 22 && c.quadratic_rows == 11,
        Err(_) => false,
    };
    let mut identical = 0;
    for seed in 0..10u64 {
        let inst = generate_grid_instance(&GridParams::new(seed, 2 + seed as usize % 3, 1 + seed as usize % 3, 40.0, VisitMode::PerEdge)).unwrap();
        for mode in [Mode::Sync, Mode::Async] {
            let opts = ModelOptions { mode, valid_inequalities: seed % 2 == 0, ..Default::default() };
            let runs: Vec<String> = (0..3).into_par_iter().map(|_| emit_lp(&build_model(&inst, &opts))).collect();
            if runs.iter().all(|r| *r == runs[0]) {
                identical += 1;
            }
        }
    }
    ok &= identical == 20;
    outcome(ok, format!("census {census:?}, {identical}/20 models emitted identically"))
}

fn restarts_agree(suite: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tol = SolveOptions::default().tol;
    let mut skeletons = Vec::new();
    for inst in suite {
        let Ok(mut all) = enumerate_skeletons(inst, Mode::Sync, &Limits::default()) else { continue };
        all.shuffle(&mut rng);
        if let Some(f) = all.into_iter().find(|f| solve_fixed(inst, f, Mode::Sync, &SolveOptions::default()).is_ok()) {
            skeletons.push((inst, f));
        }
    }
    let mut spread = 0.0f64;
    let mut failures = Vec::new();
    for (i, (inst, f)) in skeletons.iter().enumerate() {
        let mut values = Vec::new();
        for r in 0..10u64 {
            let opts = SolveOptions { init: Init::Random(100 * i as u64 + r), ..SolveOptions::default() };
            match solve_fixed(inst, f, Mode::Sync, &opts) {
                Ok(s) => values.push(s.objective),
                Err(e) => failures.push(format!("skeleton {i} restart {r}: {e}")),
            }
        }
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        if hi - lo > 10.0 * tol {
            failures.push(format!("skeleton {i} spread {:.2e}", hi - lo));
        }
        spread = spread.max(hi - lo);
    }
    outcome(
        failures.is_empty() && skeletons.len() == suite.len(),
        format!("{} skeletons, widest spread {spread:.2e} {}", skeletons.len(), failures.join("; ")),
    )
}

fn reducibility_witnesses_hold() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pt = |rng: &mut ChaCha8Rng, s: f64| Point::new(rng.gen_range(-s..s), rng.gen_range(-s..s));
    let mut witnesses = 0;
    let mut false_witnesses = 0;
    for k in 0..1000 {
        // half the configurations put both targets near a short mothership route
        let s = if k % 2 == 0 { 1.0 } else { 10.0 };
        let inp = ReducibilityInput {
            p1: pt(&mut rng, s),
            p2: pt(&mut rng, s),
            xl1: pt(&mut rng, 10.0),
            xl2: pt(&mut rng, 10.0),
            xr1: pt(&mut rng, 10.0),
            xr2: pt(&mut rng, 10.0),
            v_m: 1.0,
            v_d: rng.gen_range(1.0..4.0),
            endurance: rng.gen_range(1.0..30.0),
        };
        if let Some((xl, xr)) = check_sync_reducible(&inp) {
            witnesses += 1;
            let leg = dist(xl, xr);
            let fly = |p: Point| (dist(xl, p) + dist(p, xr)) / inp.v_d;
            let holds = fly(inp.p1) <= leg / inp.v_m + 1e-9
                && fly(inp.p2) <= leg / inp.v_m + 1e-9
                && leg / inp.v_m <= inp.endurance + 1e-9
                && leg <= dist(inp.xl1, inp.xl2) + dist(inp.xl2, inp.xr1) + dist(inp.xr1, inp.xr2) + 1e-9;
            if !holds {
                false_witnesses += 1;
            }
        }
    }
    outcome(false_witnesses == 0 && witnesses > 0, format!("{witnesses} witnesses, {false_witnesses} false"))
}

fn random_solution(rng: &mut ChaCha8Rng) -> Solution {
    let pt = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3));
    let n_stages = rng.gen_range(0..5);
    let stages: Vec<Stage> = (0..n_stages)
        .map(|_| Stage { launch: pt(rng), retrieve: pt(rng), inbound: rng.gen_range(0.0..1e3), service: rng.gen_range(0.0..1e3) })
        .collect();
    let operations = if n_stages == 0 {
        Vec::new()
    } else {
        (0..rng.gen_range(0..6))
            .map(|g| {
                let a = rng.gen_range(0..n_stages);
                Operation {
                    graph: g,
                    drone: rng.gen_range(0..3),
                    launch_stage: a,
                    retrieve_stage: rng.gen_range(a..n_stages),
                    visits: (0..rng.gen_range(1..5))
                        .map(|e| EdgeVisit { edge: e, rho: rng.gen(), lambda: rng.gen(), forward: rng.gen() })
                        .collect(),
                }
            })
            .collect()
    };
    Solution {
        mode: if rng.gen() { Mode::Sync } else { Mode::Async },
        origin: pt(rng),
        destination: pt(rng),
        stages,
        closing: rng.gen_range(0.0..1e3),
        operations,
        objective: rng.gen_range(0.0..1e4),
    }
}

fn documents_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();
    for k in 0..100u64 {
        let mode = if k % 2 == 0 { VisitMode::PerEdge } else { VisitMode::WholeGraph };
        let params = GridParams::new(k, 1 + k as usize % 10, 1 + k as usize % 4, rng.gen_range(20.0..60.0), mode);
        let inst = generate_grid_instance(&params).unwrap();
        let text = save_instance(&inst);
        match load_instance(&text) {
            Ok(back) if save_instance(&back) == text && back == inst => {}
            _ => failures.push(format!("instance {k}")),
        }
        let sol = random_solution(&mut rng);
        let text = save_solution(&sol);
        match load_solution(&text) {
            Ok(back) if save_solution(&back) == text && back == sol => {}
            _ => failures.push(format!("solution {k}")),
        }
    }
    outcome(failures.is_empty(), format!("100 instances, 100 solutions {}", failures.join("; ")))
}

#[test]
fn acceptance() {
    let suite = suite();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("exact solver matches the grid oracle", Box::new(|| exact_matches_oracle(&suite))),
        ("matheuristic is feasible and no better than exact", Box::new(|| matheuristic_is_feasible_and_bounded(&suite))),
        ("asynchronous optimum never exceeds synchronous", Box::new(|| async_no_worse_than_sync(&suite))),
        ("objective non-increasing in drones and endurance", Box::new(objective_monotone_in_fleet_and_endurance)),
        ("McCormick rows pin the product at binaries", Box::new(mccormick_is_exact_at_binaries)),
        ("subtour separation is exact and minimal", Box::new(sec_separation_is_exact)),
        ("LP emission is deterministic with the expected census", Box::new(lp_emission_is_stable)),
        ("random restarts reach the same continuous optimum", Box::new(|| restarts_agree(&suite))),
        ("reducibility witnesses satisfy every condition", Box::new(reducibility_witnesses_hold)),
        ("instance and solution documents round-trip", Box::new(documents_round_trip)),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let line = format!("{} {:>2} {name}: {} ({:.1?})\n", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail.trim(), t.elapsed());
        // written past the harness capture so the lines show in a plain `cargo test`
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
