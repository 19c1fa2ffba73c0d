//! Discretized budgets as a multiple-choice knapsack, solved by dynamic
//! programming by weights.
//!
//! Class `n` holds one item per power level `l ∈ 0..=J` with weight `l δ` and
//! profit `c_{n,l} = F^n(l δ)`. At most one item per class is packed and the
//! total weight must stay within `J δ`. Items above the per-subcarrier cap are
//! never selected.

use super::{JspaSolution, Prepared, SolverKind};
use crate::error::{Error, Result};
use crate::ops;

/// Largest number of budget vectors [`Prepared::brute_force_jspa`] will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    /// `profits[n][l] = F^n(l δ)` for `l ∈ 0..=J`.
    pub profits: Vec<Vec<f64>>,
    /// Highest selectable level per class.
    pub caps: Vec<usize>,
    /// Capacity in levels, `J`.
    pub capacity: usize,
    pub delta: f64,
}

impl KnapsackInstance {
    pub fn classes(&self) -> usize {
        self.profits.len()
    }

    pub fn weight(&self, level: usize) -> f64 {
        level as f64 * self.delta
    }

    /// Profit of a level choice, or `None` if it breaks a cap or the capacity.
    pub fn value_of(&self, levels: &[usize]) -> Option<f64> {
        if levels.iter().sum::<usize>() > self.capacity || levels.iter().zip(&self.caps).any(|(l, c)| l > c) {
            return None;
        }
        Some(levels.iter().enumerate().map(|(n, &l)| self.profits[n][l]).sum())
    }

    /// Optimal level per class, by dynamic programming over used capacity.
    ///
    /// `Z[n][l]` is the best profit of the first `n` classes within `l` levels:
    /// `Z[n][l] = max_{l' ≤ min(l, cap_n)} Z[n-1][l - l'] + c_{n,l'}`.
    pub fn solve_by_weights(&self) -> (Vec<usize>, f64) {
        let j = self.capacity;
        let mut prev = vec![0.0; j + 1];
        let mut choice = vec![vec![0u32; j + 1]; self.classes()];
        for (n, profits) in self.profits.iter().enumerate() {
            let cap = self.caps[n];
            let mut cur = vec![f64::NEG_INFINITY; j + 1];
            for l in 0..=j {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for lp in 0..=l.min(cap) {
                    let v = prev[l - lp] + profits[lp];
                    if v > best {
                        best = v;
                        arg = lp;
                    }
                }
                ops::tick(2 * (l.min(cap) as u64 + 1));
                cur[l] = best;
                choice[n][l] = arg as u32;
            }
            prev = cur;
        }
        let mut levels = vec![0; self.classes()];
        let mut l = j;
        for n in (0..self.classes()).rev() {
            levels[n] = choice[n][l] as usize;
            l -= levels[n];
        }
        (levels, prev[j])
    }
}

impl Prepared {
    /// Profits of every level on every subcarrier.
    pub fn build_knapsack(&self) -> KnapsackInstance {
        let inst = self.instance();
        let j = inst.levels();
        KnapsackInstance {
            profits: (0..inst.subcarriers())
                .map(|n| (0..=j).map(|l| if l == 0 { 0.0 } else { self.level_value(n, l) }).collect())
                .collect(),
            caps: (0..inst.subcarriers()).map(|n| inst.level_cap(n)).collect(),
            capacity: j,
            delta: inst.delta(),
        }
    }

    /// Optimal allocation with budgets restricted to multiples of `δ`.
    pub fn opt_jspa(&self) -> JspaSolution {
        let ((levels, _), ops) = ops::measure(|| self.build_knapsack().solve_by_weights());
        self.solution_from_levels(&levels, SolverKind::Opt, ops)
    }

    /// Exhaustive search over all discrete budget vectors.
    pub fn brute_force_jspa(&self) -> Result<JspaSolution> {
        let inst = self.instance();
        let j = inst.levels();
        let combinations = ((j + 1) as f64).powi(inst.subcarriers() as i32);
        if combinations > BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge { combinations, limit: BRUTE_FORCE_LIMIT });
        }
        let ((levels, _), ops) = ops::measure(|| {
            let ks = self.build_knapsack();
            let mut best = (vec![0; ks.classes()], f64::NEG_INFINITY);
            let mut cur = vec![0; ks.classes()];
            enumerate(&ks, 0, j, 0.0, &mut cur, &mut best);
            best
        });
        Ok(self.solution_from_levels(&levels, SolverKind::BruteForce, ops))
    }
}

fn enumerate(
    ks: &KnapsackInstance,
    n: usize,
    remaining: usize,
    acc: f64,
    cur: &mut Vec<usize>,
    best: &mut (Vec<usize>, f64),
) {
    if n == ks.classes() {
        if acc > best.1 {
            *best = (cur.clone(), acc);
        }
        return;
    }
    for l in 0..=remaining.min(ks.caps[n]) {
        ops::tick(1);
        cur[n] = l;
        enumerate(ks, n + 1, remaining - l, acc + ks.profits[n][l], cur, best);
    }
}
