//! Projected gradient ascent on continuous budgets.
//!
//! Starting from `P̄ = 0`, each step moves along `Δ = (F^{1'}(P̄_1), …,
//! F^{N'}(P̄_N))` using left derivatives, projects back onto the feasible set
//! and picks the step length by golden-section search on the projected path.
//! The search keeps the best point seen, `α = 0` included, so the objective
//! never decreases.

use super::{project_simplex, BudgetVector, JspaSolution, Prepared, SolverKind};
use crate::ops;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq)]
pub struct GradOptions {
    /// Stop once an iteration moves the budgets by at most `xi` (Euclidean).
    pub xi: f64,
    /// Iteration cap; `None` means `10 ⌈log2(P_max / xi)⌉ + 100`.
    pub max_iter: Option<usize>,
    pub golden_iters: usize,
}

impl GradOptions {
    pub fn new(xi: f64) -> Self {
        Self { xi, max_iter: None, golden_iters: 40 }
    }

    fn iteration_cap(&self, p_max: f64) -> usize {
        self.max_iter.unwrap_or_else(|| 10 * (p_max / self.xi).log2().ceil().max(0.0) as usize + 100)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradOutcome {
    pub solution: JspaSolution,
    pub iterations: usize,
    /// False if the iteration cap was hit first; the best iterate is returned.
    pub converged: bool,
    /// Objective after each iteration, starting with the value at `P̄ = 0`.
    pub trace: Vec<f64>,
}

/// Maximize `f` on `[lo, hi]` by golden-section search, returning the best
/// `(t, f(t))` among all evaluated points including both ends.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let mut best = (lo, f(lo));
    let consider = |t: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 {
            *best = (t, v);
        }
    };
    let v_hi = f(hi);
    consider(hi, v_hi, &mut best);

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            consider(d, fd, &mut best);
        }
    }
    best
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Prepared {
    /// Projected gradient ascent with tolerance `xi` and default options.
    pub fn grad_jspa(&self, xi: f64) -> JspaSolution {
        self.grad_jspa_with(&GradOptions::new(xi)).solution
    }

    pub fn grad_jspa_with(&self, opts: &GradOptions) -> GradOutcome {
        let ((budgets, iterations, converged, trace), ops) = ops::measure(|| self.ascend(opts));
        GradOutcome {
            solution: self.solution(BudgetVector(budgets), SolverKind::Grad, ops),
            iterations,
            converged,
            trace,
        }
    }

    fn ascend(&self, opts: &GradOptions) -> (Vec<f64>, usize, bool, Vec<f64>) {
        let inst = self.instance();
        let p_max = inst.p_max();
        let caps = inst.p_max_sub();
        let n_sub = inst.subcarriers();
        let cap = opts.iteration_cap(p_max);

        let mut p = vec![0.0; n_sub];
        let mut value = self.total_value(&p);
        let mut trace = vec![value];
        for iter in 1..=cap {
            let grad: Vec<f64> = (0..n_sub).map(|n| self.carrier(n).left_derivative(p[n])).collect();
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return (p, iter - 1, true, trace);
            }
            let step_to = |alpha: f64| -> Vec<f64> {
                let v: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x + alpha * g).collect();
                project_simplex(&v, p_max, caps)
            };
            let (alpha, best) =
                golden_section_max(|a| self.total_value(&step_to(a)), 0.0, p_max / norm, opts.golden_iters);
            let next = if alpha > 0.0 && best > value { step_to(alpha) } else { p.clone() };
            let moved = distance(&next, &p);
            if best > value {
                value = best;
            }
            p = next;
            trace.push(value);
            if moved <= opts.xi {
                return (p, iter, true, trace);
            }
        }
        (p, cap, false, trace)
    }
}
