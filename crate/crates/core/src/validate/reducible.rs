//! Whether two sequential single-point drone missions can be served by one
//! synchronized stage without lengthening the mothership route.

use crate::geometry::{dist, BBox, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducibilityInput {
    pub p1: Point,
    pub p2: Point,
    pub xl1: Point,
    pub xl2: Point,
    pub xr1: Point,
    pub xr2: Point,
    pub v_m: f64,
    pub v_d: f64,
    pub endurance: f64,
}

/// `lhs - rhs` of the four conditions for a candidate launch/retrieve pair:
/// both drone trips fit within the mothership leg, the leg fits the
/// endurance, and the leg is no longer than the three-leg route it replaces.
pub fn reducibility_residuals(inp: &ReducibilityInput, xl: Point, xr: Point) -> [f64; 4] {
    let leg = dist(xl, xr);
    let ship_time = leg / inp.v_m;
    let trip = |p: Point| (dist(xl, p) + dist(p, xr)) / inp.v_d;
    let three_legs = dist(inp.xl1, inp.xl2) + dist(inp.xl2, inp.xr1) + dist(inp.xr1, inp.xr2);
    [trip(inp.p1) - ship_time, trip(inp.p2) - ship_time, ship_time - inp.endurance, leg - three_legs]
}

fn worst(inp: &ReducibilityInput, xl: Point, xr: Point) -> f64 {
    reducibility_residuals(inp, xl, xr).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Searches for a launch/retrieve pair satisfying all four conditions.
///
/// A coarse grid over the bounding box of the six input points seeds a
/// shrinking pattern search. Any returned pair satisfies every condition
/// within `1e-9`.
pub fn check_sync_reducible(inp: &ReducibilityInput) -> Option<(Point, Point)> {
    if !(inp.v_m > 0.0 && inp.v_d > 0.0) {
        return None;
    }
    let pts = [inp.p1, inp.p2, inp.xl1, inp.xl2, inp.xr1, inp.xr2];
    if pts.iter().any(|p| !p.is_finite()) {
        return None;
    }
    let bb = BBox::enclosing(pts).unwrap();
    let span = bb.width().max(bb.height());
    let accept = |xl: Point, xr: Point| {
        let ok = reducibility_residuals(inp, xl, xr).iter().all(|r| *r <= 1e-9);
        ok.then_some((xl, xr))
    };

    let mut seeds: Vec<(Point, Point)> = Vec::new();
    for &a in &pts {
        for &b in &pts {
            seeds.push((a, b));
        }
    }
    if span > 0.0 {
        const N: usize = 9;
        let grid: Vec<Point> = (0..N)
            .flat_map(|i| {
                (0..N).map(move |j| {
                    Point::new(
                        bb.min.x + bb.width() * i as f64 / (N - 1) as f64,
                        bb.min.y + bb.height() * j as f64 / (N - 1) as f64,
                    )
                })
            })
            .collect();
        for &a in &grid {
            for &b in &grid {
                seeds.push((a, b));
            }
        }
    }
    let mut scored: Vec<(f64, usize)> = seeds.iter().enumerate().map(|(k, &(a, b))| (worst(inp, a, b), k)).collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    if let Some(&(_, k)) = scored.first() {
        if let Some(w) = accept(seeds[k].0, seeds[k].1) {
            return Some(w);
        }
    }
    if span == 0.0 {
        return None;
    }

    // pattern search in the four coordinates from the best seeds
    let dirs: [[f64; 4]; 8] = [
        [1.0, 0.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, -1.0],
    ];
    for &(_, k) in scored.iter().take(8) {
        let (mut xl, mut xr) = seeds[k];
        let mut best = worst(inp, xl, xr);
        let mut step = span / 8.0;
        while step > span * 1e-12 {
            let mut improved = false;
            for d in &dirs {
                let cl = Point::new(xl.x + step * d[0], xl.y + step * d[1]);
                let cr = Point::new(xr.x + step * d[2], xr.y + step * d[3]);
                let v = worst(inp, cl, cr);
                if v < best {
                    best = v;
                    xl = cl;
                    xr = cr;
                    improved = true;
                }
            }
            if best <= 0.0 {
                if let Some(w) = accept(xl, xr) {
                    return Some(w);
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
    None
}
