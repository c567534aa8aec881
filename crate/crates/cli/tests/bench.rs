mod common;

use common::*;
use tempfile::tempdir;

fn read_matrix(text: &str) -> Vec<Vec<Option<f64>>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().skip(1).map(|v| if v == "INF" { None } else { Some(v.parse().unwrap()) }).collect())
        .collect()
}

#[test]
fn more_drones_and_endurance_never_cost_more() {
    let dir = tempdir().unwrap();
    write_instance(dir.path(), "i.toml", &tiny(0.5));
    let args = [
        "bench", "--instance", "i.toml", "--engine", "exact", "--drones", "1,2,3", "--endurance", "1,1.5,2,4", "--threads", "4",
        "-o", "t.csv", "--matrix", "m.csv",
    ];
    let out = run(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_matrix(&std::fs::read_to_string(dir.path().join("m.csv")).unwrap());
    assert_eq!((m.len(), m[0].len()), (3, 4));
    let v = |i: usize, j: usize| m[i][j].expect("feasible cell");
    for i in 0..3 {
        for j in 0..4 {
            if i + 1 < 3 {
                assert!(v(i + 1, j) <= v(i, j) + 1e-6, "drones {i} endurance {j}");
            }
            if j + 1 < 4 {
                assert!(v(i, j + 1) <= v(i, j) + 1e-6, "drones {i} endurance {j}");
            }
        }
    }
    let table = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut r = csv::Reader::from_reader(table.as_bytes());
    assert_eq!(r.headers().unwrap().get(6), Some("objective"));
    assert_eq!(r.records().count(), 12);
}

#[test]
fn sweep_is_deterministic_and_isolates_failures() {
    let dir = tempdir().unwrap();
    write_instance(dir.path(), "i.toml", &tiny(0.5));
    let table = |name: &str| {
        let args = ["bench", "--instance", "i.toml", "--drones", "1,2", "--endurance", "0.1,2", "--no-timing", "--threads", "2", "-o", name];
        assert_eq!(code(&run(dir.path(), &args)), 0);
        std::fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let a = table("a.csv");
    assert_eq!(a, table("b.csv"));
    let mut r = csv::Reader::from_reader(a.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let infeasible = &row[1] == "0.1";
        assert_eq!(&row[6] == "INF", infeasible);
        assert_eq!(&row[8] == "true", !infeasible);
    }
}

#[test]
fn generated_sweep_runs() {
    let dir = tempdir().unwrap();
    let args = ["bench", "--graphs", "3", "--drones", "2", "--endurance", "30", "--seeds", "1,2", "--maxseed", "3", "-o", "t.csv"];
    let out = run(dir.path(), &args);
    assert_eq!(code(&out), 0);
    let table = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().skip(1).all(|l| l.contains(",true,")), "{table}");
}
