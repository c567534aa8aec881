use std::fmt::Write;

use ammdrpg::{BBox, Error, Instance, Point, Result, Solution};

const MARGIN: f64 = 0.05;

fn fmt_pt(p: Point) -> String {
    // y flipped so the plot reads like a map
    format!("{:.6},{:.6}", p.x, -p.y)
}

fn path_d(points: &[Point]) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let cmd = if i == 0 { "M" } else { " L" };
        write!(d, "{cmd}{}", fmt_pt(*p)).unwrap();
    }
    d
}

fn check_match(inst: &Instance, sol: &Solution) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidInstance(format!("solution does not match instance: {m}")));
    for (k, op) in sol.operations.iter().enumerate() {
        let Some(g) = inst.graphs.get(op.graph) else {
            return bad(format!("operation {k} names graph {}", op.graph));
        };
        if op.launch_stage >= sol.stages.len() || op.retrieve_stage >= sol.stages.len() {
            return bad(format!("operation {k} names a missing stage"));
        }
        if let Some(v) = op.visits.iter().find(|v| v.edge >= g.edges.len()) {
            return bad(format!("operation {k} names edge {} of graph {}", v.edge, op.graph));
        }
    }
    Ok(())
}

/// Draws graphs, covered sub-segments, the mothership route (one path) and
/// one path per drone operation. Deterministic in its inputs.
pub fn render_svg(inst: &Instance, sol: &Solution) -> Result<String> {
    check_match(inst, sol)?;
    let pts = inst.all_points().chain(sol.waypoints());
    let bb = BBox::enclosing(pts).unwrap_or(BBox::new(inst.origin, inst.origin));
    let pad = MARGIN * bb.width().max(bb.height()).max(1.0);
    let (x0, y0) = (bb.min.x - pad, -bb.max.y - pad);
    let (w, h) = (bb.width() + 2.0 * pad, bb.height() + 2.0 * pad);
    let stroke = 0.004 * w.max(h);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.6} {y0:.6} {w:.6} {h:.6}">"#).unwrap();
    writeln!(
        s,
        "<style>path{{fill:none;stroke-width:{stroke:.6}}} .graph{{stroke:#bbb}} .covered{{stroke:#d62728;stroke-width:{:.6}}} .mothership{{stroke:#1f77b4}} .drone{{stroke:#2ca02c;stroke-dasharray:{:.6}}}</style>",
        2.0 * stroke,
        3.0 * stroke
    )
    .unwrap();
    for (g, graph) in inst.graphs.iter().enumerate() {
        for (e, edge) in graph.edges.iter().enumerate() {
            writeln!(s, r#"<path class="graph" data-graph="{g}" data-edge="{e}" d="{}"/>"#, path_d(&[edge.segment.b, edge.segment.c]))
                .unwrap();
        }
    }
    for (k, op) in sol.operations.iter().enumerate() {
        let graph = &inst.graphs[op.graph];
        for v in &op.visits {
            let seg = graph.edges[v.edge].segment;
            let (a, b) = (seg.point_at_clamped(v.rho), seg.point_at_clamped(v.lambda));
            writeln!(s, r#"<path class="covered" data-op="{k}" data-graph="{}" data-edge="{}" d="{}"/>"#, op.graph, v.edge, path_d(&[a, b]))
                .unwrap();
        }
    }
    writeln!(s, r#"<path class="mothership" d="{}"/>"#, path_d(&sol.waypoints())).unwrap();
    for (k, op) in sol.operations.iter().enumerate() {
        let graph = &inst.graphs[op.graph];
        let mut legs = vec![sol.stages[op.launch_stage].launch];
        for v in &op.visits {
            let seg = graph.edges[v.edge].segment;
            legs.push(seg.point_at_clamped(v.rho));
            legs.push(seg.point_at_clamped(v.lambda));
        }
        legs.push(sol.stages[op.retrieve_stage].retrieve);
        writeln!(s, r#"<path class="drone" data-op="{k}" data-drone="{}" d="{}"/>"#, op.drone, path_d(&legs)).unwrap();
    }
    let r = 2.0 * stroke;
    for (t, st) in sol.stages.iter().enumerate() {
        let (l, rr) = (fmt_pt(st.launch), fmt_pt(st.retrieve));
        let (lx, ly) = l.split_once(',').unwrap();
        let (rx, ry) = rr.split_once(',').unwrap();
        writeln!(s, r##"<circle class="launch" cx="{lx}" cy="{ly}" r="{r:.6}" fill="#1f77b4"><title>L{}</title></circle>"##, t + 1).unwrap();
        writeln!(s, r##"<circle class="retrieve" cx="{rx}" cy="{ry}" r="{r:.6}" fill="#ff7f0e"><title>R{}</title></circle>"##, t + 1).unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}
