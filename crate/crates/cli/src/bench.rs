//! Benchmark sweep over instance size, fleet size, endurance and seeds.

use std::time::Instant;

use ammdrpg::convex_sub::SolveOptions;
use ammdrpg::exact::{solve_exact, Limits};
use ammdrpg::instance::{generate_grid_instance, GridParams};
use ammdrpg::validate::check_solution_in;
use ammdrpg::{run_matheuristic, Error, Instance, MatheuristicParams, Mode, Result, VisitMode};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Matheuristic,
    Exact,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Matheuristic => "matheuristic",
            Engine::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    /// Ignored when `base` is set.
    pub graphs: Vec<usize>,
    pub drones: Vec<usize>,
    pub endurance: Vec<f64>,
    pub seeds: Vec<u64>,
    pub visit: VisitMode,
    pub engines: Vec<Engine>,
    pub mode: Mode,
    pub heuristic: MatheuristicParams,
    /// Fixed instance whose fleet and endurance are overridden per cell.
    pub base: Option<Instance>,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub graphs: usize,
    pub endurance: f64,
    pub visit: VisitMode,
    pub drones: usize,
    pub seed: u64,
    pub engine: Engine,
    /// `None` when the cell has no solution.
    pub objective: Option<f64>,
    pub runtime_ms: f64,
    pub valid: bool,
    pub note: String,
}

struct Job {
    graphs: usize,
    drones: usize,
    endurance: f64,
    seed: u64,
    engine: Engine,
}

fn run_cell(sweep: &Sweep, job: &Job) -> Cell {
    let mut cell = Cell {
        graphs: job.graphs,
        endurance: job.endurance,
        visit: sweep.visit,
        drones: job.drones,
        seed: job.seed,
        engine: job.engine,
        objective: None,
        runtime_ms: 0.0,
        valid: false,
        note: String::new(),
    };
    let inst = match &sweep.base {
        Some(b) => Ok(b.with_drones(job.drones).with_endurance(job.endurance)),
        None => generate_grid_instance(&GridParams::new(job.seed, job.graphs, job.drones, job.endurance, sweep.visit)),
    };
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            cell.note = e.to_string();
            return cell;
        }
    };
    let start = Instant::now();
    let outcome = match job.engine {
        Engine::Matheuristic => {
            let params = MatheuristicParams { seed: job.seed, ..sweep.heuristic };
            run_matheuristic(&inst, &params).map(|r| r.solution)
        }
        Engine::Exact => solve_exact(&inst, sweep.mode, &sweep.limits, &SolveOptions::with_tol(sweep.heuristic.tol)).map(|r| r.solution),
    };
    cell.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(sol) => {
            cell.valid = check_solution_in(&inst, &sol, sweep.mode, sweep.heuristic.tol).passed();
            cell.objective = Some(sol.objective);
        }
        Err(e) => cell.note = e.to_string(),
    }
    cell
}

/// Runs every cell on a pool of `threads` workers; results come back in
/// sweep order regardless of scheduling.
pub fn run_sweep(sweep: &Sweep, threads: usize) -> Result<Vec<Cell>> {
    let graphs = match &sweep.base {
        Some(b) => vec![b.graphs.len()],
        None => sweep.graphs.clone(),
    };
    let mut jobs = Vec::new();
    for &g in &graphs {
        for &e in &sweep.endurance {
            for &d in &sweep.drones {
                for &seed in &sweep.seeds {
                    for &engine in &sweep.engines {
                        jobs.push(Job { graphs: g, drones: d, endurance: e, seed, engine });
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok(pool.install(|| jobs.par_iter().map(|j| run_cell(sweep, j)).collect()))
}

/// Comma-separated table with a header row. `INF` marks cells without a
/// solution; `timing = false` blanks the runtime column so runs compare
/// byte for byte.
pub fn write_table(cells: &[Cell], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["graphs", "endurance", "visit", "drones", "seed", "engine", "objective", "runtime_ms", "valid", "note"])
        .unwrap();
    for c in cells {
        w.write_record([
            c.graphs.to_string(),
            c.endurance.to_string(),
            c.visit.as_str().to_string(),
            c.drones.to_string(),
            c.seed.to_string(),
            c.engine.as_str().to_string(),
            c.objective.map_or("INF".to_string(), |v| format!("{v:.9}")),
            if timing { format!("{:.3}", c.runtime_ms) } else { "-".to_string() },
            c.valid.to_string(),
            c.note.clone(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Mean objective per (drones, endurance) for one engine, over every other
/// axis. A cell with any missing solution is `None`.
pub fn objective_matrix(cells: &[Cell], engine: Engine) -> (Vec<usize>, Vec<f64>, Vec<Vec<Option<f64>>>) {
    let mut drones: Vec<usize> = cells.iter().map(|c| c.drones).collect();
    drones.sort_unstable();
    drones.dedup();
    let mut endurance: Vec<f64> = cells.iter().map(|c| c.endurance).collect();
    endurance.sort_by(f64::total_cmp);
    endurance.dedup();
    let grid = drones
        .iter()
        .map(|&d| {
            endurance
                .iter()
                .map(|&e| {
                    let sel: Vec<&Cell> = cells.iter().filter(|c| c.engine == engine && c.drones == d && c.endurance == e).collect();
                    if sel.is_empty() || sel.iter().any(|c| c.objective.is_none()) {
                        None
                    } else {
                        Some(sel.iter().map(|c| c.objective.unwrap()).sum::<f64>() / sel.len() as f64)
                    }
                })
                .collect()
        })
        .collect();
    (drones, endurance, grid)
}

/// The matrix as CSV: one row per fleet size, one column per endurance.
pub fn write_matrix(drones: &[usize], endurance: &[f64], grid: &[Vec<Option<f64>>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["drones".to_string()];
    head.extend(endurance.iter().map(|e| e.to_string()));
    w.write_record(&head).unwrap();
    for (d, row) in drones.iter().zip(grid) {
        let mut rec = vec![d.to_string()];
        rec.extend(row.iter().map(|v| v.map_or("INF".to_string(), |v| format!("{v:.9}"))));
        w.write_record(&rec).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
