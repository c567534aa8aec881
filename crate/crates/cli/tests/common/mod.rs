#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ammdrpg::{Instance, Point, TargetGraph, VisitMode};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ammdrpg"))
}

pub fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Two single-edge graphs above the origin-destination line.
pub fn tiny(alpha: f64) -> Instance {
    let p = Point::new;
    let a = TargetGraph::new(0, vec![p(2.0, 1.0), p(3.0, 1.5)], &[(0, 1, alpha)], alpha);
    let b = TargetGraph::new(1, vec![p(6.0, 1.0), p(7.0, 0.5)], &[(0, 1, alpha)], alpha);
    Instance {
        origin: p(0.0, 0.0),
        destination: p(9.0, 0.0),
        graphs: vec![a, b],
        n_drones: 1,
        v_m: 1.0,
        v_d: 2.0,
        endurance: 3.0,
        visit_mode: VisitMode::PerEdge,
    }
}

pub fn write_instance(dir: &Path, name: &str, inst: &Instance) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, ammdrpg::instance::save_instance(inst)).unwrap();
    path
}
