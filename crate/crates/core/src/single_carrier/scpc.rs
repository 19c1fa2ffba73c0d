//! Power control on one subcarrier for a fixed set of active users.

use crate::error::{Error, Result};
use crate::model::Carrier;
use crate::ops;

/// Active decoding positions on one subcarrier, strictly increasing.
///
/// The `t`-th active position closes block `t`, which spans the positions
/// after the previous active one up to and including it. Every position in a
/// block shares the same cumulative power.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActiveSet(Vec<usize>);

impl ActiveSet {
    pub fn new(positions: Vec<usize>, users: usize) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ConstraintViolation("active positions must be strictly increasing".into()));
        }
        if positions.last().is_some_and(|&p| p >= users) {
            return Err(Error::ConstraintViolation(format!("active position out of range for {users} users")));
        }
        Ok(Self(positions))
    }

    /// Positions where a cumulative column strictly decreases (`x_K = 0`).
    pub fn of_column(x: &[f64]) -> Self {
        Self(
            (0..x.len())
                .filter(|&i| x[i] > x.get(i + 1).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First position of block `t`.
    pub fn block_start(&self, t: usize) -> usize {
        if t == 0 {
            0
        } else {
            self.0[t - 1] + 1
        }
    }

    /// Constant part of the objective: `A^n` plus the inactive tail after the
    /// last active position evaluated at zero.
    pub fn tail_constant(&self, carrier: &Carrier) -> f64 {
        let k = carrier.users();
        let start = self.0.last().map_or(0, |&p| p + 1);
        if start < k {
            carrier.f(start, k - 1, 0.0) + carrier.offset()
        } else {
            carrier.offset()
        }
    }

    /// Objective value of per-block powers `xs`.
    pub fn value(&self, carrier: &Carrier, xs: &[f64]) -> f64 {
        debug_assert_eq!(xs.len(), self.len());
        let blocks: f64 = xs
            .iter()
            .enumerate()
            .map(|(t, &x)| carrier.f(self.block_start(t), self.0[t], x))
            .sum();
        blocks + self.tail_constant(carrier)
    }

    /// Full cumulative column from per-block powers.
    pub fn expand(&self, xs: &[f64], users: usize) -> Vec<f64> {
        let mut col = vec![0.0; users];
        for (t, &x) in xs.iter().enumerate() {
            col[self.block_start(t)..=self.0[t]].fill(x);
        }
        col
    }
}

/// Optimal cumulative powers of the active blocks under budget `p_bar`.
///
/// Blocks are placed left to right at their own maximizer; when a block wants
/// more power than its predecessor, it is merged backwards with earlier blocks
/// until the merged maximizer fits under the remaining predecessor.
pub fn scpc(carrier: &Carrier, active: &ActiveSet, p_bar: f64) -> Vec<f64> {
    let act = active.positions();
    let mut xs = vec![0.0; act.len()];
    for t in 0..act.len() {
        let mut best = carrier.argmax(active.block_start(t), act[t], p_bar);
        let mut j = t;
        while j > 0 {
            ops::tick(1);
            if xs[j - 1] >= best {
                break;
            }
            best = carrier.argmax(active.block_start(j - 1), act[t], p_bar);
            j -= 1;
        }
        xs[j..=t].fill(best);
    }
    xs
}

/// SCPC solved once at the full budget; lower budgets are answered by
/// truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct IScpc {
    active: ActiveSet,
    stored: Vec<f64>,
    budget: f64,
}

impl IScpc {
    pub fn precompute(carrier: &Carrier, active: ActiveSet, p_max: f64) -> Self {
        let stored = scpc(carrier, &active, p_max);
        Self { active, stored, budget: p_max }
    }

    pub fn active(&self) -> &ActiveSet {
        &self.active
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Per-block powers for budget `p_bar <= budget()`.
    pub fn eval(&self, p_bar: f64) -> Vec<f64> {
        ops::tick(self.stored.len() as u64);
        self.stored.iter().map(|&x| x.min(p_bar)).collect()
    }
}
