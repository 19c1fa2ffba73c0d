//! Joint user selection and power control on one subcarrier.
//!
//! `V[m, j, i]` is the best value of `Σ_{l ≥ j} f_l(x_l)` using at most `m`
//! active positions, with `x_j = … = x_i` forced equal. Filling the table from
//! the last position backwards, each cell either activates position `i` (the
//! block `j..=i` sits at its own maximizer on top of the best `m - 1` solution
//! for `i + 1..`) or extends the equal block to `i + 1`.

use std::f64::consts::LN_2;

use super::scpc::ActiveSet;
use crate::model::Carrier;
use crate::ops;

type Cell = (usize, usize, usize);

/// Dynamic-programming tables of SCUS for one subcarrier and budget.
///
/// Values exclude the constant `A^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScusTables {
    users: usize,
    max_active: usize,
    budget: f64,
    v: Vec<f64>,
    x: Vec<f64>,
    u: Vec<Option<Cell>>,
}

impl ScusTables {
    pub fn build(carrier: &Carrier, max_active: usize, p_bar: f64) -> Self {
        let k = carrier.users();
        let size = (max_active + 1) * k * k;
        let mut t = Self {
            users: k,
            max_active,
            budget: p_bar,
            v: vec![f64::NAN; size],
            x: vec![0.0; size],
            u: vec![None; size],
        };

        for i in (0..k).rev() {
            for j in (0..=i).rev() {
                let idx = t.idx(0, j, i);
                t.v[idx] = carrier.f(j, k - 1, 0.0);
            }
        }
        for m in 1..=max_active {
            for j in (0..k).rev() {
                let best = carrier.argmax(j, k - 1, p_bar);
                let idx = t.idx(m, j, k - 1);
                t.v[idx] = carrier.f(j, k - 1, best);
                t.x[idx] = best;
            }
        }
        for i in (0..k.saturating_sub(1)).rev() {
            for m in 1..=max_active {
                let next = t.idx(m - 1, i + 1, i + 1);
                let (v_next, x_next) = (t.v[next], t.x[next]);
                for j in (0..=i).rev() {
                    let best = carrier.argmax(j, i, p_bar);
                    let v_act = carrier.f(j, i, best) + v_next;
                    let inact = t.idx(m, j, i + 1);
                    let v_inact = t.v[inact];
                    ops::tick(4);
                    let idx = t.idx(m, j, i);
                    if v_act > v_inact && best > x_next {
                        t.v[idx] = v_act;
                        t.x[idx] = best;
                        t.u[idx] = Some((m - 1, i + 1, i + 1));
                    } else {
                        t.v[idx] = v_inact;
                        t.x[idx] = t.x[inact];
                        t.u[idx] = Some((m, j, i + 1));
                    }
                }
            }
        }
        t
    }

    fn idx(&self, m: usize, j: usize, i: usize) -> usize {
        (m * self.users + j) * self.users + i
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn max_active(&self) -> usize {
        self.max_active
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn value(&self, m: usize, j: usize, i: usize) -> f64 {
        self.v[self.idx(m, j, i)]
    }

    pub fn power(&self, m: usize, j: usize, i: usize) -> f64 {
        self.x[self.idx(m, j, i)]
    }

    pub fn predecessor(&self, m: usize, j: usize, i: usize) -> Option<(usize, usize, usize)> {
        self.u[self.idx(m, j, i)]
    }

    /// Cumulative column achieving `V[m, j, i]`; positions before `j` are 0.
    pub fn backtrack(&self, m: usize, j: usize, i: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.users];
        let mut cur = Some((m, j, i));
        while let Some((m, j, i)) = cur {
            col[j..=i].fill(self.power(m, j, i));
            cur = self.predecessor(m, j, i);
        }
        col
    }

    /// Optimal column for the full subcarrier problem.
    pub fn solution(&self) -> Vec<f64> {
        self.backtrack(self.max_active, 0, 0)
    }

    /// Write `V`, `X` and `U` as CSV rows `m,j,i,value,power,pred_m,pred_j,pred_i`.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "m,j,i,value,power,pred_m,pred_j,pred_i")?;
        for m in 0..=self.max_active {
            for j in 0..self.users {
                for i in j..self.users {
                    let (pm, pj, pi) = match self.predecessor(m, j, i) {
                        Some((a, b, c)) => (a.to_string(), b.to_string(), c.to_string()),
                        None => Default::default(),
                    };
                    writeln!(
                        out,
                        "{m},{j},{i},{},{},{pm},{pj},{pi}",
                        self.value(m, j, i),
                        self.power(m, j, i)
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Result of a single-carrier solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierSolution {
    /// Cumulative powers by decoding position.
    pub x: Vec<f64>,
    /// Weighted sum-rate on this subcarrier, `F^n(P̄)`.
    pub value: f64,
}

/// Optimal user selection and power control on one subcarrier with budget `p_bar`.
pub fn scus(carrier: &Carrier, max_active: usize, p_bar: f64) -> CarrierSolution {
    let tables = ScusTables::build(carrier, max_active, p_bar);
    let x = tables.solution();
    let value = tables.value(max_active, 0, 0) + carrier.offset();
    CarrierSolution { x, value }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    active: ActiveSet,
    /// Stored power of each active block.
    blocks: Vec<f64>,
    /// Full stored column.
    column: Vec<f64>,
    constant: f64,
}

impl Entry {
    fn value(&self, carrier: &Carrier, p_bar: f64) -> f64 {
        ops::tick(2 * self.blocks.len() as u64 + 1);
        let act = self.active.positions();
        self.blocks
            .iter()
            .enumerate()
            .map(|(t, &x)| carrier.f(self.active.block_start(t), act[t], x.min(p_bar)))
            .sum::<f64>()
            + self.constant
    }

    /// Last position whose truncated power equals `p_bar`.
    fn saturated_position(&self, p_bar: f64) -> Option<usize> {
        self.column.iter().rposition(|&x| x >= p_bar)
    }
}

/// SCUS precomputed at the full budget, answering any lower budget from `K`
/// stored candidate solutions.
///
/// Candidate `i` is the optimum with positions `0..=i` forced equal. For a
/// budget `P̄`, every candidate is truncated to `min(x, P̄)` and the best one
/// is the optimum at `P̄`. Ties keep the lower `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IScus {
    carrier: Carrier,
    budget: f64,
    entries: Vec<Entry>,
}

impl IScus {
    pub fn precompute(carrier: &Carrier, max_active: usize, p_max: f64) -> Self {
        let tables = ScusTables::build(carrier, max_active, p_max);
        Self::from_tables(carrier, &tables)
    }

    pub fn from_tables(carrier: &Carrier, tables: &ScusTables) -> Self {
        let entries = (0..tables.users())
            .map(|i| {
                let column = tables.backtrack(tables.max_active(), 0, i);
                let active = ActiveSet::of_column(&column);
                let blocks = active.positions().iter().map(|&p| column[p]).collect();
                let constant = active.tail_constant(carrier);
                Entry { active, blocks, column, constant }
            })
            .collect();
        Self { carrier: carrier.clone(), budget: tables.budget(), entries }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    /// Budget the tables were built with.
    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Stored candidate columns, one per prefix index.
    pub fn candidates(&self) -> impl Iterator<Item = (&ActiveSet, &[f64])> {
        self.entries.iter().map(|e| (&e.active, e.column.as_slice()))
    }

    fn select(&self, p_bar: f64) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (idx, e) in self.entries.iter().enumerate() {
            let v = e.value(&self.carrier, p_bar);
            if v > best.1 {
                best = (idx, v);
            }
        }
        best
    }

    /// `F^n(P̄)`.
    pub fn value(&self, p_bar: f64) -> f64 {
        self.select(p_bar).1
    }

    /// Optimal column and value for budget `p_bar <= budget()`.
    pub fn eval(&self, p_bar: f64) -> CarrierSolution {
        let (idx, value) = self.select(p_bar);
        let x = self.entries[idx].column.iter().map(|&x| x.min(p_bar)).collect();
        CarrierSolution { x, value }
    }

    /// Left derivative of `F^n` at `p_bar`.
    ///
    /// Uses the selected candidate's last position saturated at `p_bar`. At
    /// `p_bar = 0` the value of every candidate is 0, and the candidate taken
    /// is the one with the steepest start.
    pub fn left_derivative(&self, p_bar: f64) -> f64 {
        if p_bar <= 0.0 {
            return self
                .entries
                .iter()
                .filter_map(|e| e.active.positions().last().map(|&l| self.carrier.leading_slope(l, 0.0)))
                .fold(0.0, f64::max);
        }
        let (idx, _) = self.select(p_bar);
        match self.entries[idx].saturated_position(p_bar) {
            Some(l) => self.carrier.leading_slope(l, p_bar),
            None => 0.0,
        }
    }

    /// Slope of the steepest tangent any candidate can have at `p_bar`,
    /// `max_k W w_k / ((p_bar + η̃_k) ln 2)`.
    pub fn max_slope(&self, p_bar: f64) -> f64 {
        let c = &self.carrier;
        (0..c.users())
            .map(|k| c.bandwidth * c.weight[k] / ((p_bar + c.noise[k]) * LN_2))
            .fold(0.0, f64::max)
    }
}
