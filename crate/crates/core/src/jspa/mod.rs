//! Joint subcarrier and power allocation.
//!
//! Every allocator here searches over per-subcarrier budgets `P̄ = (P̄_1, …,
//! P̄_N)` with `Σ P̄_n ≤ P_max` and `P̄_n ≤ P_max^n`; the value of a budget
//! vector is `Σ_n F^n(P̄_n)`, where `F^n` comes from the precomputed
//! single-carrier solvers held by [`Prepared`].
//!
//! * [`Prepared::opt_jspa`]: exact optimum over multiples of `δ`, dynamic
//!   programming by weights in `O(J²N)`.
//! * [`Prepared::eps_jspa`]: `(1 - ε)`-approximation, dynamic programming by
//!   scaled profits over a few items per subcarrier.
//! * [`Prepared::grad_jspa`]: projected gradient ascent on continuous budgets.
//! * [`Prepared::brute_force_jspa`]: exhaustive search, for testing.

mod fptas;
mod grad;
mod knapsack;
mod projection;

use std::fmt;

pub use fptas::ItemSelection;
pub use grad::{golden_section_max, GradOptions, GradOutcome};
pub use knapsack::{KnapsackInstance, BRUTE_FORCE_LIMIT};
pub use projection::project_simplex;

use crate::error::{Error, Result};
use crate::model::{Instance, XAllocation};
use crate::single_carrier::IScus;

/// Per-subcarrier power budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetVector(pub Vec<f64>);

impl BudgetVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Check `Σ P̄_n ≤ P_max` and `0 ≤ P̄_n ≤ P_max^n` with absolute slack `tol`.
    pub fn check_feasible(&self, instance: &Instance, tol: f64) -> Result<()> {
        if self.0.len() != instance.subcarriers() {
            return Err(Error::ConstraintViolation("budget vector has the wrong length".into()));
        }
        for (n, (&b, &cap)) in self.0.iter().zip(instance.p_max_sub()).enumerate() {
            if !(b >= -tol && b <= cap + tol) {
                return Err(Error::ConstraintViolation(format!("budget {b} on subcarrier {n} outside [0, {cap}]")));
            }
        }
        if self.total() > instance.p_max() + tol {
            return Err(Error::ConstraintViolation(format!(
                "budgets sum to {} > {}",
                self.total(),
                instance.p_max()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    Opt,
    Eps(f64),
    Grad,
    BruteForce,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::Opt => f.write_str("opt"),
            SolverKind::Eps(e) => write!(f, "eps{e}"),
            SolverKind::Grad => f.write_str("grad"),
            SolverKind::BruteForce => f.write_str("brute"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JspaSolution {
    pub budgets: BudgetVector,
    pub x: XAllocation,
    /// Weighted sum-rate, bits/s.
    pub wsr: f64,
    pub solver: SolverKind,
    /// Basic operations spent by the solver, 0 unless counting was enabled.
    pub ops: u64,
}

/// An instance with i-SCUS precomputed on every subcarrier.
#[derive(Debug, Clone)]
pub struct Prepared {
    instance: Instance,
    carriers: Vec<IScus>,
}

impl Prepared {
    pub fn new(instance: &Instance) -> Self {
        let carriers = instance
            .carriers()
            .iter()
            .map(|c| IScus::precompute(c, instance.max_multiplexed(), instance.p_max()))
            .collect();
        Self { instance: instance.clone(), carriers }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn carrier(&self, n: usize) -> &IScus {
        &self.carriers[n]
    }

    pub fn carriers(&self) -> &[IScus] {
        &self.carriers
    }

    /// `F^n(P̄)`.
    pub fn value(&self, n: usize, p_bar: f64) -> f64 {
        self.carriers[n].value(p_bar)
    }

    /// `Σ_n F^n(P̄_n)`.
    pub fn total_value(&self, budgets: &[f64]) -> f64 {
        budgets.iter().enumerate().map(|(n, &b)| self.value(n, b)).sum()
    }

    /// `F^n(l δ)`.
    pub fn level_value(&self, n: usize, level: usize) -> f64 {
        self.value(n, self.instance.level_power(level))
    }

    /// Materialize the allocation for a budget vector.
    pub fn solution(&self, budgets: BudgetVector, solver: SolverKind, ops: u64) -> JspaSolution {
        let mut columns = Vec::with_capacity(budgets.0.len());
        let mut wsr = 0.0;
        for (n, &b) in budgets.0.iter().enumerate() {
            let s = self.carriers[n].eval(b);
            wsr += s.value;
            columns.push(s.x);
        }
        let x = XAllocation::from_columns(columns).expect("i-SCUS columns are non-increasing");
        JspaSolution { budgets, x, wsr, solver, ops }
    }

    pub(crate) fn solution_from_levels(&self, levels: &[usize], solver: SolverKind, ops: u64) -> JspaSolution {
        let budgets = BudgetVector(levels.iter().map(|&l| self.instance.level_power(l)).collect());
        self.solution(budgets, solver, ops)
    }
}
