use std::fmt::Write;

use super::{validate_instance, Instance, TargetGraph, VisitMode};
use crate::error::{Error, Result};
use crate::textfmt::*;

pub const INSTANCE_HEADER: &str = "ammdrpg-instance v1";

/// Serializes an instance to the v1 text format.
pub fn save_instance(inst: &Instance) -> String {
    let mut s = String::new();
    writeln!(s, "{INSTANCE_HEADER}").unwrap();
    writeln!(s, "origin = {}", point(inst.origin)).unwrap();
    writeln!(s, "destination = {}", point(inst.destination)).unwrap();
    writeln!(s, "visit = \"{}\"", inst.visit_mode.as_str()).unwrap();
    writeln!(s, "\n[fleet]").unwrap();
    writeln!(s, "drones = {}", inst.n_drones).unwrap();
    writeln!(s, "v_m = {}", num(inst.v_m)).unwrap();
    writeln!(s, "v_d = {}", num(inst.v_d)).unwrap();
    writeln!(s, "endurance = {}", num(inst.endurance)).unwrap();
    for g in &inst.graphs {
        writeln!(s, "\n[[graph]]").unwrap();
        writeln!(s, "id = {}", g.id).unwrap();
        writeln!(s, "alpha = {}", num(g.alpha)).unwrap();
        writeln!(s, "nodes = [").unwrap();
        for p in &g.nodes {
            writeln!(s, "  {},", point(*p)).unwrap();
        }
        writeln!(s, "]").unwrap();
        writeln!(s, "edges = [").unwrap();
        for e in &g.edges {
            writeln!(s, "  {{ from = {}, to = {}, alpha = {} }},", e.from, e.to, num(e.alpha)).unwrap();
        }
        writeln!(s, "]").unwrap();
    }
    s
}

/// Parses and validates a v1 instance document.
pub fn load_instance(text: &str) -> Result<Instance> {
    let doc = parse_document(text, "ammdrpg-instance", "v1")?;
    let origin = get_point(&doc, "origin", "")?;
    let destination = get_point(&doc, "destination", "")?;
    let visit = as_str(get(&doc, "visit", "")?, "visit")?;
    let visit_mode = VisitMode::parse(visit).ok_or_else(|| bad("visit", "\"edge\" or \"graph\""))?;
    let fleet = get_table(&doc, "fleet", "")?;
    let n_drones = get_usize(fleet, "drones", "fleet")?;
    let v_m = get_f64(fleet, "v_m", "fleet")?;
    let v_d = get_f64(fleet, "v_d", "fleet")?;
    let endurance = get_f64(fleet, "endurance", "fleet")?;

    let mut graphs = Vec::new();
    if let Some(list) = doc.get("graph") {
        for (gi, gv) in as_array(list, "graph")?.iter().enumerate() {
            let path = format!("graph[{gi}]");
            let gt = as_table(gv, &path)?;
            let id = get_usize(gt, "id", &path)?;
            let alpha = get_f64(gt, "alpha", &path)?;
            let nodes = get_array(gt, "nodes", &path)?
                .iter()
                .enumerate()
                .map(|(k, v)| as_point(v, &format!("{path}.nodes[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            let mut edges = Vec::new();
            for (ei, ev) in get_array(gt, "edges", &path)?.iter().enumerate() {
                let epath = format!("{path}.edges[{ei}]");
                let et = as_table(ev, &epath)?;
                edges.push((
                    get_usize(et, "from", &epath)?,
                    get_usize(et, "to", &epath)?,
                    get_f64(et, "alpha", &epath)?,
                ));
            }
            graphs.push(TargetGraph::new(id, nodes, &edges, alpha));
        }
    }
    let inst = Instance { origin, destination, graphs, n_drones, v_m, v_d, endurance, visit_mode };
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        let msg = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(Error::InvalidInstance(msg));
    }
    Ok(inst)
}
