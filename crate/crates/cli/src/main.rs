use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ammdrpg::convex_sub::SolveOptions;
use ammdrpg::exact::{solve_exact, Limits};
use ammdrpg::instance::{generate_grid_instance, load_instance, save_instance, GridParams};
use ammdrpg::model_ir::{assign_solution, build_model, emit_lp, model_stats, warm_start};
use ammdrpg::solution::{load_solution, save_solution};
use ammdrpg::validate::{check_solution_with, CheckOptions};
use ammdrpg::{run_matheuristic, Error, Instance, MatheuristicParams, Mode, ModelOptions, Solution, Subtour, VisitMode};
use ammdrpg_cli::bench::{objective_matrix, run_sweep, write_matrix, write_table, Engine, Sweep};
use ammdrpg_cli::render::render_svg;
use clap::{Parser, Subcommand, ValueEnum};

/// Mothership and drones routing over target graphs.
#[derive(Parser)]
#[command(name = "ammdrpg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VisitArg {
    Edge,
    Graph,
}

impl From<VisitArg> for VisitMode {
    fn from(v: VisitArg) -> Self {
        match v {
            VisitArg::Edge => VisitMode::PerEdge,
            VisitArg::Graph => VisitMode::WholeGraph,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sync,
    Async,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sync => Mode::Sync,
            ModeArg::Async => Mode::Async,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EngineArg {
    Matheuristic,
    Exact,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubtourArg {
    Mtz,
    Sec,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(clap::Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "sync")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "mtz")]
    subtour: SubtourArg,
    #[arg(long, value_enum, default_value = "off")]
    vi: Toggle,
    /// One launch and one retrieve per stage across the whole fleet.
    #[arg(long)]
    literal_stage_cap: bool,
    /// Bound the in-stage mothership distance by the endurance value itself.
    #[arg(long)]
    literal_cap: bool,
}

impl ModelArgs {
    fn options(&self) -> ModelOptions {
        ModelOptions {
            mode: self.mode.into(),
            subtour: match self.subtour {
                SubtourArg::Mtz => Subtour::Mtz,
                SubtourArg::Sec => Subtour::Sec,
            },
            valid_inequalities: self.vi == Toggle::On,
            literal_stage_cap: self.literal_stage_cap,
            literal_cap: self.literal_cap,
        }
    }
}

#[derive(clap::Args)]
struct HeuristicArgs {
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    maxseed: u64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    maxit: u64,
    /// Merge clusters only while they stay smaller than the fleet.
    #[arg(long)]
    strict_merge: bool,
}

impl HeuristicArgs {
    fn params(&self) -> MatheuristicParams {
        MatheuristicParams {
            maxseed: self.maxseed as usize,
            maxit: self.maxit as usize,
            tol: self.tol,
            seed: self.seed,
            strict_size: self.strict_merge,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random grid-graph instance.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        graphs: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        drones: u64,
        #[arg(long)]
        endurance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "edge")]
        visit: VisitArg,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Solve an instance and write the solution and its validation report.
    Solve {
        #[arg(long, short)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "matheuristic")]
        engine: EngineArg,
        #[command(flatten)]
        heuristic: HeuristicArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short)]
        out: PathBuf,
        /// Defaults to the solution path with a `.report` extension.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the solution's binaries as a warm start for the model.
        #[arg(long)]
        emit_warmstart: Option<PathBuf>,
    },
    /// Write the model in LP format.
    Emit {
        #[arg(long, short)]
        instance: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short)]
        out: PathBuf,
        /// Solution whose binaries become a warm start.
        #[arg(long, requires = "warmstart_out")]
        warmstart_from: Option<PathBuf>,
        #[arg(long, requires = "warmstart_from")]
        warmstart_out: Option<PathBuf>,
    },
    /// Draw an instance and a solution as SVG.
    Render {
        #[arg(long, short)]
        instance: PathBuf,
        #[arg(long, short)]
        solution: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Check a solution against every constraint family.
    Validate {
        #[arg(long, short)]
        instance: PathBuf,
        #[arg(long, short)]
        solution: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Defaults to the solution's own mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        literal_cap: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep and write the results table and the objective matrix.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        graphs: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        drones: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        endurance: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, value_enum, default_value = "edge")]
        visit: VisitArg,
        #[arg(long, value_enum, default_value = "matheuristic")]
        engine: EngineArg,
        #[arg(long, value_enum, default_value = "sync")]
        mode: ModeArg,
        /// Sweep fleet size and endurance on this instance instead of generating.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        heuristic: HeuristicArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Leave the runtime column blank.
        #[arg(long)]
        no_timing: bool,
    },
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Limits(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::InfeasibleGraph { .. } => Failure::Infeasible(e.to_string()),
            Error::LimitsExceeded(_) => Failure::Limits(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_pair(instance: &Path, solution: &Path) -> Result<(Instance, Solution), Failure> {
    Ok((load_instance(&read(instance)?)?, load_solution(&read(solution)?)?))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { graphs, drones, endurance, seed, visit, out } => {
            let params = GridParams::new(seed, graphs as usize, drones as usize, endurance, visit.into());
            let inst = generate_grid_instance(&params)?;
            write(&out, &save_instance(&inst))?;
            println!(
                "graphs {} edges {} drones {} v_m {} v_d {} endurance {} visit {}",
                inst.graphs.len(),
                inst.total_edges(),
                inst.n_drones,
                inst.v_m,
                inst.v_d,
                inst.endurance,
                inst.visit_mode.as_str()
            );
        }
        Command::Solve { instance, engine, heuristic, model, out, report, emit_warmstart } => {
            let inst = load_instance(&read(&instance)?)?;
            let mode: Mode = model.mode.into();
            let mut sol = match engine {
                EngineArg::Matheuristic => {
                    // the heuristic solution is synchronous, hence valid in either mode
                    let mut s = run_matheuristic(&inst, &heuristic.params())?.solution;
                    s.mode = mode;
                    s
                }
                EngineArg::Exact => solve_exact(&inst, mode, &Limits::default(), &SolveOptions::with_tol(heuristic.tol))?.solution,
                EngineArg::Both => return Err(Failure::Usage("`--engine both` is only meaningful for bench".into())),
            };
            sol.mode = mode;
            let opts = CheckOptions { tol: heuristic.tol, mode, literal_cap: model.literal_cap };
            let rep = check_solution_with(&inst, &sol, &opts);
            write(&out, &save_solution(&sol))?;
            write(&report.unwrap_or_else(|| out.with_extension("report")), &rep.to_document())?;
            if let Some(ws) = emit_warmstart {
                let m = build_model(&inst, &model.options());
                let x = assign_solution(&m, &inst, &sol)?;
                write(&ws, &warm_start(&m, &x))?;
            }
            println!("objective {:.9}", sol.objective);
            print!("{rep}");
            if !rep.passed() {
                return Err(Failure::Infeasible("solution failed validation".into()));
            }
        }
        Command::Emit { instance, model, out, warmstart_from, warmstart_out } => {
            let inst = load_instance(&read(&instance)?)?;
            let m = build_model(&inst, &model.options());
            write(&out, &emit_lp(&m))?;
            if let (Some(from), Some(to)) = (warmstart_from, warmstart_out) {
                let sol = load_solution(&read(&from)?)?;
                let x = assign_solution(&m, &inst, &sol)?;
                write(&to, &warm_start(&m, &x))?;
            }
            let st = model_stats(&m);
            println!("variables {} linear {} cones {}", st.n_variables, st.n_linear, st.n_soc);
            for (tag, n) in &st.linear {
                println!("  {tag} {n}");
            }
        }
        Command::Render { instance, solution, out } => {
            let (inst, sol) = load_pair(&instance, &solution)?;
            write(&out, &render_svg(&inst, &sol)?)?;
        }
        Command::Validate { instance, solution, tol, mode, literal_cap, out } => {
            let (inst, sol) = load_pair(&instance, &solution)?;
            let mode = mode.map_or(sol.mode, Mode::from);
            let rep = check_solution_with(&inst, &sol, &CheckOptions { tol, mode, literal_cap });
            if let Some(out) = out {
                write(&out, &rep.to_document())?;
            }
            print!("{rep}");
            if !rep.passed() {
                return Err(Failure::Infeasible("solution failed validation".into()));
            }
        }
        Command::Bench {
            graphs,
            drones,
            endurance,
            seeds,
            visit,
            engine,
            mode,
            instance,
            heuristic,
            threads,
            out,
            matrix,
            no_timing,
        } => {
            let base = match instance {
                Some(p) => Some(load_instance(&read(&p)?)?),
                None => None,
            };
            let engines = match engine {
                EngineArg::Matheuristic => vec![Engine::Matheuristic],
                EngineArg::Exact => vec![Engine::Exact],
                EngineArg::Both => vec![Engine::Matheuristic, Engine::Exact],
            };
            let main_engine = engines[engines.len() - 1];
            let sweep = Sweep {
                graphs,
                drones,
                endurance,
                seeds,
                visit: visit.into(),
                engines,
                mode: mode.into(),
                heuristic: heuristic.params(),
                base,
                limits: Limits { max_drones: 3, ..Limits::default() },
            };
            let cells = run_sweep(&sweep, threads)?;
            write(&out, &write_table(&cells, !no_timing))?;
            let (d, e, grid) = objective_matrix(&cells, main_engine);
            let text = write_matrix(&d, &e, &grid);
            match matrix {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Infeasible(m) => (3, m),
                Failure::Limits(m) => (4, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
