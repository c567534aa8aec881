mod common;

use ammdrpg::exact::grid_oracle;
use ammdrpg::instance::{load_instance, save_instance};
use ammdrpg::model_ir::{build_model, parse_lp_census, parse_warmstart};
use ammdrpg::solution::{load_solution, save_solution};
use ammdrpg::{Mode, ModelOptions};
use common::*;
use tempfile::tempdir;

#[test]
fn generate_writes_a_reloadable_instance() {
    let dir = tempdir().unwrap();
    let args = ["generate", "--graphs", "5", "--drones", "2", "--endurance", "40", "--seed", "7", "-o", "a.toml"];
    let out = run(dir.path(), &args);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("graphs 5 "));
    let text = std::fs::read_to_string(dir.path().join("a.toml")).unwrap();
    let inst = load_instance(&text).unwrap();
    assert_eq!(inst.graphs.len(), 5);
    assert_eq!(inst.v_d, 2.0 * inst.v_m);
    assert_eq!(save_instance(&inst), text);

    let mut again = args;
    again[10] = "b.toml";
    assert_eq!(code(&run(dir.path(), &again)), 0);
    assert_eq!(std::fs::read(dir.path().join("b.toml")).unwrap(), text.as_bytes());
}

#[test]
fn generate_rejects_zero_graphs() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["generate", "--graphs", "0", "--drones", "1", "--endurance", "5", "-o", "x.toml"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exact_and_heuristic_solves() {
    let dir = tempdir().unwrap();
    let inst = tiny(0.5);
    write_instance(dir.path(), "i.toml", &inst);
    let out = run(dir.path(), &["solve", "-i", "i.toml", "--engine", "exact", "-o", "exact.toml", "--emit-warmstart", "ws.txt"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let exact_text = std::fs::read_to_string(dir.path().join("exact.toml")).unwrap();
    let exact = load_solution(&exact_text).unwrap();
    assert_eq!(save_solution(&exact), exact_text);
    let oracle = grid_oracle(&inst, 0.02).unwrap().value;
    assert!((exact.objective - oracle).abs() <= f64::max(1e-3, 0.01 * oracle), "{} vs {oracle}", exact.objective);
    let report = std::fs::read_to_string(dir.path().join("exact.report")).unwrap();
    assert!(report.starts_with("ammdrpg-report v1"));

    let model = build_model(&inst, &ModelOptions::default());
    let ws = parse_warmstart(&model, &std::fs::read_to_string(dir.path().join("ws.txt")).unwrap()).unwrap();
    assert!(!ws.is_empty());

    let out = run(dir.path(), &["solve", "-i", "i.toml", "-o", "heur.toml"]);
    assert_eq!(code(&out), 0);
    let heur = load_solution(&std::fs::read_to_string(dir.path().join("heur.toml")).unwrap()).unwrap();
    assert!(heur.objective >= exact.objective - 1e-6);
    assert_eq!(code(&run(dir.path(), &["validate", "-i", "i.toml", "-s", "heur.toml"])), 0);
    assert_eq!(code(&run(dir.path(), &["validate", "-i", "i.toml", "-s", "heur.toml", "--mode", "async"])), 0);
}

#[test]
fn exit_codes_for_limits_and_infeasibility() {
    let dir = tempdir().unwrap();
    run(dir.path(), &["generate", "--graphs", "5", "--drones", "2", "--endurance", "40", "-o", "big.toml"]);
    let out = run(dir.path(), &["solve", "-i", "big.toml", "--engine", "exact", "-o", "s.toml"]);
    assert_eq!(code(&out), 4);

    let mut inst = tiny(1.0);
    inst.endurance = 0.1;
    write_instance(dir.path(), "short.toml", &inst);
    let out = run(dir.path(), &["solve", "-i", "short.toml", "-o", "s.toml"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("graph 0"));

    assert_eq!(code(&run(dir.path(), &["solve", "-i", "missing.toml", "-o", "s.toml"])), 2);
}

#[test]
fn validate_flags_a_broken_solution() {
    let dir = tempdir().unwrap();
    write_instance(dir.path(), "i.toml", &tiny(0.5));
    run(dir.path(), &["solve", "-i", "i.toml", "-o", "s.toml"]);
    let mut sol = load_solution(&std::fs::read_to_string(dir.path().join("s.toml")).unwrap()).unwrap();
    sol.operations[0].visits[0].lambda = sol.operations[0].visits[0].rho;
    std::fs::write(dir.path().join("bad.toml"), save_solution(&sol)).unwrap();
    let out = run(dir.path(), &["validate", "-i", "i.toml", "-s", "bad.toml", "--out", "bad.report"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("coverage"));
}

#[test]
fn emission_is_stable_and_flag_driven() {
    let dir = tempdir().unwrap();
    write_instance(dir.path(), "i.toml", &tiny(0.5));
    let lp = |name: &str, extra: &[&str]| {
        let mut args = vec!["emit", "-i", "i.toml", "-o", name];
        args.extend_from_slice(extra);
        assert_eq!(code(&run(dir.path(), &args)), 0);
        std::fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let a = lp("a.lp", &[]);
    assert_eq!(a, lp("b.lp", &[]));
    let sync = parse_lp_census(&a).unwrap();
    let asyn = parse_lp_census(&lp("async.lp", &["--mode", "async"])).unwrap();
    assert!(asyn.linear_rows > sync.linear_rows);
    let vi = lp("vi.lp", &["--vi", "on"]);
    assert!(!a.contains("Monotonicity_"));
    assert!(vi.contains(" Monotonicity_t1: beta_t1 - beta_t2 <= 0"));

    run(dir.path(), &["solve", "-i", "i.toml", "-o", "s.toml"]);
    let out = run(dir.path(), &["emit", "-i", "i.toml", "-o", "c.lp", "--warmstart-from", "s.toml", "--warmstart-out", "w.txt"]);
    assert_eq!(code(&out), 0);
    let inst = load_instance(&std::fs::read_to_string(dir.path().join("i.toml")).unwrap()).unwrap();
    let m = build_model(&inst, &ModelOptions { mode: Mode::Sync, ..Default::default() });
    assert!(parse_warmstart(&m, &std::fs::read_to_string(dir.path().join("w.txt")).unwrap()).is_ok());
}
