//! Primal log-barrier method for small problems of the form
//!
//! ```text
//! minimize    c'x
//! subject to  a_i(x) <= 0            (affine)
//!             ||(p_j(x), q_j(x))|| <= s_j(x)   (second-order cone, affine p, q, s)
//! ```
//!
//! Phase I finds a strictly feasible point (or a certificate that none
//! exists), phase II follows the central path. Iterates are always strictly
//! feasible, and after centering at parameter `t` the duality gap is at most
//! `theta / t` where `theta` is the total barrier parameter (1 per affine
//! row, 2 per cone).

use nalgebra::{DMatrix, DVector};

/// Sparse affine form `sum coef * x[idx] + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine { terms: Vec::new(), constant: c }
    }

    pub fn var(i: usize) -> Self {
        Affine { terms: vec![(i, 1.0)], constant: 0.0 }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().fold(self.constant, |acc, &(i, c)| acc + c * x[i])
    }

    pub fn scaled(mut self, k: f64) -> Self {
        for t in &mut self.terms {
            t.1 *= k;
        }
        self.constant *= k;
        self
    }

    pub fn add(mut self, other: &Affine) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
        self
    }

    pub fn sub(self, other: &Affine) -> Self {
        self.add(&other.clone().scaled(-1.0))
    }

    pub fn plus_const(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }
}

#[derive(Debug, Clone)]
pub enum Constraint {
    /// `expr <= 0`
    Affine(Affine),
    /// `||(u, v)|| <= s`
    Cone { s: Affine, u: Affine, v: Affine },
}

impl Constraint {
    fn degree(&self) -> f64 {
        match self {
            Constraint::Affine(_) => 1.0,
            Constraint::Cone { .. } => 2.0,
        }
    }

    /// Amount by which the constraint is violated (negative when strictly satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            Constraint::Affine(a) => a.eval(x),
            Constraint::Cone { s, u, v } => u.eval(x).hypot(v.eval(x)) - s.eval(x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Program {
    pub n: usize,
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    /// Stop when the certified gap is below this value.
    pub gap: f64,
    /// Phase I declares infeasibility when the minimal violation provably exceeds this.
    pub feas_tol: f64,
    pub max_newton: usize,
    pub mu: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { gap: 1e-9, feas_tol: 1e-7, max_newton: 4000, mu: 20.0 }
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Optimal(Report),
    Infeasible { min_violation_lower_bound: f64 },
    NonConverged { iterations: usize },
}

#[derive(Debug, Clone)]
pub struct Report {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Certified bound on `objective - optimum`.
    pub gap: f64,
    /// Every constraint is satisfied up to this relaxation (0 unless the
    /// feasible set has empty interior at the phase I resolution).
    pub relaxation: f64,
    pub newton_steps: usize,
    /// Barrier merit change of every accepted step; all entries are `<= 0`.
    pub merit_steps: Vec<f64>,
    /// Objective value after each centering.
    pub path_objective: Vec<f64>,
}

struct Barrier<'a> {
    cons: &'a [Constraint],
    /// Relaxation added to every constraint.
    relax: f64,
    /// Index of the phase I slack variable, if any.
    slack: Option<usize>,
}

impl Barrier<'_> {
    /// Slack of constraint `k`; `None` outside the barrier domain.
    fn slack_of(&self, k: usize, x: &[f64]) -> Option<f64> {
        let extra = self.relax + self.slack.map_or(0.0, |i| x[i]);
        match &self.cons[k] {
            Constraint::Affine(a) => {
                let s = extra - a.eval(x);
                (s > 0.0).then_some(s)
            }
            Constraint::Cone { s, u, v } => {
                let tau = s.eval(x) + extra;
                let (uu, vv) = (u.eval(x), v.eval(x));
                let r = uu.hypot(vv);
                if tau <= r {
                    return None;
                }
                let q = (tau - r) * (tau + r);
                (q > 0.0).then_some(q)
            }
        }
    }

    fn slacks(&self, x: &[f64]) -> Option<Vec<f64>> {
        (0..self.cons.len()).map(|k| self.slack_of(k, x)).collect()
    }

    /// Adds the gradient and Hessian of `-sum log(slack)` at `x`.
    fn accumulate(&self, x: &[f64], slacks: &[f64], g: &mut DVector<f64>, h: &mut DMatrix<f64>) {
        let extra = self.relax + self.slack.map_or(0.0, |i| x[i]);
        let mut idx: Vec<usize> = Vec::with_capacity(16);
        for (k, c) in self.cons.iter().enumerate() {
            let sl = slacks[k];
            match c {
                Constraint::Affine(a) => {
                    // slack = extra - a(x)
                    let mut grad_s: Vec<(usize, f64)> = a.terms.iter().map(|&(i, c)| (i, -c)).collect();
                    if let Some(si) = self.slack {
                        grad_s.push((si, 1.0));
                    }
                    for &(i, gi) in &grad_s {
                        g[i] -= gi / sl;
                        for &(j, gj) in &grad_s {
                            h[(i, j)] += gi * gj / (sl * sl);
                        }
                    }
                }
                Constraint::Cone { s, u, v } => {
                    idx.clear();
                    let mut collect = |aff: &Affine| {
                        for &(i, _) in &aff.terms {
                            if !idx.contains(&i) {
                                idx.push(i);
                            }
                        }
                    };
                    collect(s);
                    collect(u);
                    collect(v);
                    if let Some(si) = self.slack {
                        if !idx.contains(&si) {
                            idx.push(si);
                        }
                    }
                    let m = idx.len();
                    let dense = |aff: &Affine, with_slack: bool| {
                        let mut d = vec![0.0; m];
                        for &(i, c) in &aff.terms {
                            d[idx.iter().position(|&j| j == i).unwrap()] += c;
                        }
                        if with_slack {
                            if let Some(si) = self.slack {
                                d[idx.iter().position(|&j| j == si).unwrap()] += 1.0;
                            }
                        }
                        d
                    };
                    let ds = dense(s, true);
                    let du = dense(u, false);
                    let dv = dense(v, false);
                    let tau = s.eval(x) + extra;
                    let (uu, vv) = (u.eval(x), v.eval(x));
                    // q = tau^2 - u^2 - v^2
                    let gq: Vec<f64> = (0..m).map(|a| 2.0 * (tau * ds[a] - uu * du[a] - vv * dv[a])).collect();
                    for a in 0..m {
                        g[idx[a]] -= gq[a] / sl;
                        for b in 0..m {
                            let hq = 2.0 * (ds[a] * ds[b] - du[a] * du[b] - dv[a] * dv[b]);
                            h[(idx[a], idx[b])] += gq[a] * gq[b] / (sl * sl) - hq / sl;
                        }
                    }
                }
            }
        }
    }
}

struct PathState {
    newton: usize,
    merit_steps: Vec<f64>,
    path_objective: Vec<f64>,
}

/// Centers `x` for barrier parameter `t`. Returns `false` if the Newton budget ran out.
fn center(
    bar: &Barrier,
    obj: &[(usize, f64)],
    t: f64,
    x: &mut [f64],
    st: &mut PathState,
    max_newton: usize,
    mut stop: impl FnMut(&[f64]) -> bool,
) -> bool {
    let n = x.len();
    for _ in 0..200 {
        if st.newton >= max_newton {
            return false;
        }
        if stop(x) {
            return true;
        }
        let slacks = match bar.slacks(x) {
            Some(s) => s,
            None => return false,
        };
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for &(i, c) in obj {
            g[i] += t * c;
        }
        bar.accumulate(x, &slacks, &mut g, &mut h);
        let dx = match solve_newton(&h, &g) {
            Some(d) => d,
            None => return false,
        };
        st.newton += 1;
        let slope = g.dot(&dx);
        let decrement = -slope;
        if decrement / 2.0 <= 1e-10 {
            return true;
        }
        // backtracking; merit change computed directly to avoid cancellation
        let mut step = 1.0;
        let mut trial = vec![0.0; n];
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = x[i] + step * dx[i];
            }
            if let Some(ns) = bar.slacks(&trial) {
                let lin: f64 = obj.iter().map(|&(i, c)| t * c * step * dx[i]).sum();
                let logs: f64 = ns.iter().zip(&slacks).map(|(a, b)| (a / b).ln()).sum();
                let change = lin - logs;
                if change <= 0.01 * step * slope {
                    x.copy_from_slice(&trial);
                    st.merit_steps.push(change);
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // no further progress possible at this precision
            return true;
        }
    }
    true
}

fn solve_newton(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let n = h.nrows();
    let scale = (0..n).map(|i| h[(i, i)].abs()).fold(0.0f64, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut m = h.clone();
        if reg > 0.0 {
            for i in 0..n {
                m[(i, i)] += reg;
            }
        }
        if let Some(ch) = m.cholesky() {
            let d = ch.solve(&(-g));
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        reg = if reg == 0.0 { scale * 1e-14 } else { reg * 100.0 };
    }
    None
}

fn objective_value(obj: &[(usize, f64)], x: &[f64]) -> f64 {
    obj.iter().map(|&(i, c)| c * x[i]).sum()
}

/// Solves `prog` from the starting point `x0` (which need not be feasible).
pub fn solve(prog: &Program, x0: &[f64], settings: &Settings) -> Outcome {
    let theta: f64 = prog.constraints.iter().map(Constraint::degree).sum();
    let mut st = PathState { newton: 0, merit_steps: Vec::new(), path_objective: Vec::new() };

    // phase I: minimize s subject to every constraint relaxed by s, s >= -1
    let worst = prog.constraints.iter().map(|c| c.violation(x0)).fold(f64::NEG_INFINITY, f64::max);
    let mut x: Vec<f64> = x0.to_vec();
    let mut relaxation = 0.0;
    if prog.constraints.is_empty() || worst < -1e-9 {
        // start is already strictly feasible
    } else {
        let si = prog.n;
        let mut cons1 = prog.constraints.clone();
        // every row below is relaxed by s as well; this one reads s >= -1
        cons1.push(Constraint::Affine(Affine::constant(-1.0)));
        // the barrier alone is unbounded below along free directions; box them in
        let bound = 100.0 * (1.0 + x0.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        for i in 0..prog.n {
            cons1.push(Constraint::Affine(Affine { terms: vec![(i, 1.0)], constant: -bound }));
            cons1.push(Constraint::Affine(Affine { terms: vec![(i, -1.0)], constant: -bound }));
        }
        let theta1 = theta + 1.0 + 2.0 * prog.n as f64;
        let bar = Barrier { cons: &cons1, relax: 0.0, slack: Some(si) };
        let mut y = x0.to_vec();
        y.push(worst.max(0.0) + 1.0);
        let obj1 = vec![(si, 1.0)];
        let margin = 0.1 * settings.feas_tol;
        let mut t = theta1;
        let mut phase_state = PathState { newton: 0, merit_steps: Vec::new(), path_objective: Vec::new() };
        loop {
            let ok = center(&bar, &obj1, t, &mut y, &mut phase_state, settings.max_newton, |y| y[si] < -margin);
            let s = y[si];
            if s < -margin {
                break;
            }
            if !ok {
                return Outcome::NonConverged { iterations: phase_state.newton };
            }
            let lower = s - theta1 / t;
            if lower > settings.feas_tol {
                return Outcome::Infeasible { min_violation_lower_bound: lower };
            }
            if theta1 / t < 0.01 * settings.feas_tol {
                // borderline: the feasible set is (numerically) without interior
                let r = s.max(0.0) + margin;
                if r > settings.feas_tol {
                    return Outcome::Infeasible { min_violation_lower_bound: lower.max(0.0) };
                }
                relaxation = r + margin;
                break;
            }
            t *= settings.mu;
        }
        st.newton += phase_state.newton;
        y.truncate(prog.n);
        x = y;
    }

    // phase II
    let bar = Barrier { cons: &prog.constraints, relax: relaxation, slack: None };
    if bar.slacks(&x).is_none() {
        return Outcome::NonConverged { iterations: st.newton };
    }
    let f0 = objective_value(&prog.objective, &x);
    let mut t = if theta > 0.0 { theta / (1.0 + f0.abs()) } else { 1.0 };
    loop {
        let ok = center(&bar, &prog.objective, t, &mut x, &mut st, settings.max_newton, |_| false);
        let f = objective_value(&prog.objective, &x);
        st.path_objective.push(f);
        if !ok {
            return Outcome::NonConverged { iterations: st.newton };
        }
        let gap = theta / t;
        if gap <= settings.gap * (1.0 + f.abs()) {
            return Outcome::Optimal(Report {
                objective: f,
                x,
                gap,
                relaxation,
                newton_steps: st.newton,
                merit_steps: st.merit_steps,
                path_objective: st.path_objective,
            });
        }
        t *= settings.mu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(terms: &[(usize, f64)], c: f64) -> Constraint {
        Constraint::Affine(Affine { terms: terms.to_vec(), constant: c })
    }

    #[test]
    fn box_lp() {
        // min -x - y s.t. x <= 1, y <= 2, x + y <= 2.5
        let prog = Program {
            n: 2,
            objective: vec![(0, -1.0), (1, -1.0)],
            constraints: vec![lin(&[(0, 1.0)], -1.0), lin(&[(1, 1.0)], -2.0), lin(&[(0, 1.0), (1, 1.0)], -2.5)],
        };
        match solve(&prog, &[5.0, 5.0], &Settings::default()) {
            Outcome::Optimal(r) => {
                assert!((r.objective + 2.5).abs() < 1e-7);
                assert!(r.merit_steps.iter().all(|d| *d <= 0.0));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn distance_to_point() {
        // min t s.t. ||(x - 3, y - 4)|| <= t, x <= 0  -> point (0, 4)? no: nearest point with x <= 0 is (0,4), t = 3
        let prog = Program {
            n: 3,
            objective: vec![(2, 1.0)],
            constraints: vec![
                Constraint::Cone {
                    s: Affine::var(2),
                    u: Affine::var(0).plus_const(-3.0),
                    v: Affine::var(1).plus_const(-4.0),
                },
                lin(&[(0, 1.0)], 0.0),
            ],
        };
        match solve(&prog, &[1.0, 1.0, 0.0], &Settings::default()) {
            Outcome::Optimal(r) => {
                assert!((r.objective - 3.0).abs() < 1e-7, "{}", r.objective);
                assert!(r.x[0] <= 1e-12);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        // x <= -1 and x >= 1
        let prog = Program { n: 1, objective: vec![(0, 1.0)], constraints: vec![lin(&[(0, 1.0)], 1.0), lin(&[(0, -1.0)], 1.0)] };
        assert!(matches!(solve(&prog, &[0.0], &Settings::default()), Outcome::Infeasible { .. }));
    }

    #[test]
    fn empty_interior_handled() {
        // x <= 1 and x >= 1: single point
        let prog = Program { n: 1, objective: vec![(0, 1.0)], constraints: vec![lin(&[(0, 1.0)], -1.0), lin(&[(0, -1.0)], 1.0)] };
        match solve(&prog, &[0.0], &Settings::default()) {
            Outcome::Optimal(r) => {
                assert!((r.x[0] - 1.0).abs() < 1e-6);
                assert!(r.relaxation <= 1e-7);
            }
            o => panic!("{o:?}"),
        }
    }
}
