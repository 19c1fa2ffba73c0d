//! `(1 - ε)`-approximate allocation by profit scaling.
//!
//! 1. Bracket the discrete optimum `F*` with `U ≥ F* ≥ U / 4`, using a coarse
//!    knapsack with `2N + 1` levels per subcarrier spaced `⌊J/N⌋ δ` apart,
//!    capacity `2 P_max`, and a greedy 1/2-approximation.
//! 2. On each subcarrier keep only the cheapest level reaching each profit
//!    threshold `q ε U / 4N`, found by a multi-key binary search over the
//!    non-decreasing profits `F^n(l δ)`.
//! 3. Run dynamic programming by profits on the scaled profits
//!    `⌊c / (ε U / 4N)⌋`: minimal power to reach each scaled profit.

use std::collections::BTreeMap;

use super::{BudgetVector, JspaSolution, Prepared, SolverKind};
use crate::model::levels_for;
use crate::ops;

/// Levels kept on one subcarrier and their profits.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSelection {
    /// Strictly increasing selected levels; level 0 is implicit and excluded.
    pub levels: Vec<usize>,
    pub profits: Vec<f64>,
    /// Distinct profit evaluations performed.
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Item {
    weight: usize,
    profit: f64,
}

/// Greedy multiple-choice knapsack bound: fill along the upper concave hull
/// of every class in order of decreasing incremental efficiency, stop at the
/// first increment that does not fit, and return the better of that packing
/// and the best single item. At least half the optimum.
fn greedy_half_approximation(classes: &[Vec<Item>], capacity: usize) -> f64 {
    let mut increments: Vec<(f64, usize, f64)> = Vec::new();
    let mut best_single: f64 = 0.0;
    for items in classes {
        let mut sorted: Vec<Item> = items.iter().copied().filter(|it| it.weight <= capacity).collect();
        sorted.push(Item { weight: 0, profit: 0.0 });
        sorted.sort_by(|a, b| a.weight.cmp(&b.weight).then(b.profit.total_cmp(&a.profit)));
        sorted.dedup_by_key(|it| it.weight);
        for it in &sorted {
            best_single = best_single.max(it.profit);
        }
        // upper hull starting at the empty choice
        let mut hull: Vec<Item> = Vec::new();
        for it in sorted {
            if hull.last().is_some_and(|h| it.profit <= h.profit) {
                continue;
            }
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (b.weight - a.weight) as f64 * (it.profit - a.profit)
                    - (it.weight - a.weight) as f64 * (b.profit - a.profit);
                ops::tick(4);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(it);
        }
        for w in hull.windows(2) {
            let dw = w[1].weight - w[0].weight;
            let dp = w[1].profit - w[0].profit;
            increments.push((dp / dw as f64, dw, dp));
        }
    }
    increments.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut room = capacity;
    let mut greedy = 0.0;
    for &(_, dw, dp) in &increments {
        ops::tick(2);
        if dw > room {
            break;
        }
        room -= dw;
        greedy += dp;
    }
    f64::max(greedy, best_single)
}

impl Prepared {
    /// Upper estimate `U` of the discrete optimum with `U ≥ F* ≥ U / 4`.
    ///
    /// Coarse levels above a subcarrier's cap are dropped.
    pub fn estimate_upper_bound(&self) -> f64 {
        let inst = self.instance();
        let n_sub = inst.subcarriers();
        let spacing = (inst.levels() / n_sub).max(1);
        let classes: Vec<Vec<Item>> = (0..n_sub)
            .map(|n| {
                (1..=2 * n_sub)
                    .map(|l| l * spacing)
                    .take_while(|&level| level <= inst.level_cap(n))
                    .map(|level| Item { weight: level, profit: self.level_value(n, level) })
                    .collect()
            })
            .collect();
        let capacity = levels_for(2.0 * inst.p_max(), inst.delta());
        2.0 * greedy_half_approximation(&classes, capacity)
    }

    /// Cheapest level on subcarrier `n` reaching each threshold `q ε U / 4N`,
    /// `q = 1..=⌊4N/ε⌋`.
    pub fn select_items(&self, n: usize, upper: f64, eps: f64) -> ItemSelection {
        let inst = self.instance();
        if !(upper > 0.0) || !(eps > 0.0) {
            return ItemSelection { levels: vec![], profits: vec![], evaluations: 0 };
        }
        let n_sub = inst.subcarriers() as f64;
        let step = eps * upper / (4.0 * n_sub);
        let count = (4.0 * n_sub / eps).floor() as usize;
        let keys: Vec<f64> = (1..=count).map(|q| q as f64 * step).collect();

        let cap = inst.level_cap(n);
        let mut memo = BTreeMap::new();
        let mut answers = Vec::with_capacity(keys.len());
        multi_key_search(1, cap + 1, &keys, &mut |l| *memo.entry(l).or_insert_with(|| self.level_value(n, l)), &mut answers);

        let mut levels: Vec<usize> = answers.into_iter().filter(|&l| l <= cap).collect();
        levels.dedup();
        let profits = levels.iter().map(|l| memo[l]).collect();
        ItemSelection { levels, profits, evaluations: memo.len() }
    }

    /// `(1 - ε)`-approximate allocation over multiples of `δ`.
    pub fn eps_jspa(&self, eps: f64) -> JspaSolution {
        let (levels, ops) = ops::measure(|| self.eps_levels(eps));
        match levels {
            Some(levels) => self.solution_from_levels(&levels, SolverKind::Eps(eps), ops),
            None => self.solution(BudgetVector::zeros(self.instance().subcarriers()), SolverKind::Eps(eps), ops),
        }
    }

    fn eps_levels(&self, eps: f64) -> Option<Vec<usize>> {
        let inst = self.instance();
        let n_sub = inst.subcarriers();
        let upper = self.estimate_upper_bound();
        if !(upper > 0.0) || !(eps > 0.0) {
            return None;
        }
        let step = eps * upper / (4.0 * n_sub as f64);
        let q_max = (4.0 * n_sub as f64 / eps).floor() as usize;
        let capacity = inst.levels();

        // scaled profit of a kept level: largest q with q * step <= c
        let scale = |c: f64| -> usize {
            let mut q = (c / step).floor().max(0.0) as usize;
            while (q + 1) as f64 * step <= c {
                q += 1;
            }
            while q > 0 && q as f64 * step > c {
                q -= 1;
            }
            q.min(q_max)
        };

        let classes: Vec<Vec<(usize, usize)>> = (0..n_sub)
            .map(|n| {
                let sel = self.select_items(n, upper, eps);
                sel.levels.iter().zip(&sel.profits).map(|(&l, &c)| (l, scale(c))).collect()
            })
            .collect();

        // min_power[q]: least total level reaching scaled profit q
        const UNREACHABLE: usize = usize::MAX;
        let mut prev = vec![UNREACHABLE; q_max + 1];
        prev[0] = 0;
        let mut choice = vec![vec![None::<usize>; q_max + 1]; n_sub];
        for (n, items) in classes.iter().enumerate() {
            let mut cur = prev.clone();
            for q in 0..=q_max {
                for (idx, &(level, gain)) in items.iter().enumerate() {
                    ops::tick(2);
                    if gain > q || prev[q - gain] == UNREACHABLE {
                        continue;
                    }
                    let w = prev[q - gain] + level;
                    if w < cur[q] {
                        cur[q] = w;
                        choice[n][q] = Some(idx);
                    }
                }
            }
            prev = cur;
        }
        let mut q = (0..=q_max).rev().find(|&q| prev[q] <= capacity)?;
        let mut levels = vec![0; n_sub];
        for n in (0..n_sub).rev() {
            if let Some(idx) = choice[n][q] {
                let (level, gain) = classes[n][idx];
                levels[n] = level;
                q -= gain;
            }
        }
        Some(levels)
    }
}

/// For every key (ascending), the smallest `l ∈ [lo, hi)` with `value(l) >= key`,
/// or `hi` if none. Each probe is shared by all keys still in its range.
fn multi_key_search(lo: usize, hi: usize, keys: &[f64], value: &mut impl FnMut(usize) -> f64, out: &mut Vec<usize>) {
    if keys.is_empty() {
        return;
    }
    if lo == hi {
        out.extend(std::iter::repeat_n(lo, keys.len()));
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let v = value(mid);
    let split = keys.partition_point(|&k| k <= v);
    multi_key_search(lo, mid, &keys[..split], value, out);
    multi_key_search(mid + 1, hi, &keys[split..], value, out);
}
