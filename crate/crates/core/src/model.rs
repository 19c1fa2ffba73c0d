//! Problem instances, SIC decoding order, rates and the separable reformulation.
//!
//! Users on a subcarrier are decoded from the highest to the lowest normalized
//! noise `η̃ = η / g`. Everything downstream works in *decoding positions*
//! rather than user indices: position 0 is decoded first, position `K - 1`
//! last. A [`Carrier`] holds one subcarrier's weights and normalized noises
//! already permuted into decoding order.
//!
//! With cumulative powers `x_i = Σ_{j ≥ i} p_{π(j)}` the weighted sum-rate of
//! a subcarrier becomes `Σ_i f_i(x_i) + A`, a sum of one-variable functions.
//! [`Carrier::f`] evaluates the merged block function `f_{j,i}` (the sum of
//! `f_j..f_i` at a common argument) and [`Carrier::argmax`] its closed-form
//! maximizer on `[0, P̄]`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::ops;

/// Raw data for an [`Instance`]. Matrices are indexed `[user][subcarrier]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceData {
    pub weights: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub gains: Vec<Vec<f64>>,
    pub noise: Vec<Vec<f64>>,
    pub p_max: f64,
    /// Per-subcarrier power limits; `None` means every limit equals `p_max`.
    pub p_max_sub: Option<Vec<f64>>,
    /// Minimum transmit power step.
    pub delta: f64,
    /// Maximum number of users multiplexed on one subcarrier.
    pub max_multiplexed: usize,
}

/// A validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    weights: Vec<f64>,
    bandwidths: Vec<f64>,
    gains: Vec<Vec<f64>>,
    noise: Vec<Vec<f64>>,
    p_max: f64,
    p_max_sub: Vec<f64>,
    delta: f64,
    max_multiplexed: usize,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self> {
        let k = data.weights.len();
        let n = data.bandwidths.len();
        if k == 0 || n == 0 {
            return Err(Error::InvalidInstance("need at least one user and one subcarrier".into()));
        }
        for &w in &data.weights {
            positive("weight", w)?;
        }
        for &b in &data.bandwidths {
            positive("bandwidth", b)?;
        }
        for (name, m) in [("gains", &data.gains), ("noise", &data.noise)] {
            if m.len() != k || m.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidInstance(format!("{name} must be {k}x{n}")));
            }
            for &v in m.iter().flatten() {
                positive(name, v)?;
            }
        }
        positive("p_max", data.p_max)?;
        positive("delta", data.delta)?;
        if data.delta > data.p_max {
            return Err(Error::InvalidInstance("delta must not exceed p_max".into()));
        }
        if data.max_multiplexed == 0 || data.max_multiplexed > k {
            return Err(Error::InvalidInstance(format!(
                "max_multiplexed must be in 1..={k}, got {}",
                data.max_multiplexed
            )));
        }
        let p_max_sub = data.p_max_sub.unwrap_or_else(|| vec![data.p_max; n]);
        if p_max_sub.len() != n {
            return Err(Error::InvalidInstance(format!("p_max_sub must have {n} entries")));
        }
        for &c in &p_max_sub {
            positive("p_max_sub", c)?;
            if c > data.p_max {
                return Err(Error::InvalidInstance("p_max_sub entries must not exceed p_max".into()));
            }
        }
        Ok(Self {
            weights: data.weights,
            bandwidths: data.bandwidths,
            gains: data.gains,
            noise: data.noise,
            p_max: data.p_max,
            p_max_sub,
            delta: data.delta,
            max_multiplexed: data.max_multiplexed,
        })
    }

    /// Same channel, different multiplexing limit.
    pub fn with_max_multiplexed(&self, m: usize) -> Result<Self> {
        let mut data = self.to_data();
        data.max_multiplexed = m;
        Self::new(data)
    }

    /// Same channel, different power step.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut data = self.to_data();
        data.delta = delta;
        Self::new(data)
    }

    pub fn to_data(&self) -> InstanceData {
        InstanceData {
            weights: self.weights.clone(),
            bandwidths: self.bandwidths.clone(),
            gains: self.gains.clone(),
            noise: self.noise.clone(),
            p_max: self.p_max,
            p_max_sub: Some(self.p_max_sub.clone()),
            delta: self.delta,
            max_multiplexed: self.max_multiplexed,
        }
    }

    pub fn users(&self) -> usize {
        self.weights.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.bandwidths.len()
    }

    pub fn max_multiplexed(&self) -> usize {
        self.max_multiplexed
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn gain(&self, k: usize, n: usize) -> f64 {
        self.gains[k][n]
    }

    pub fn noise(&self, k: usize, n: usize) -> f64 {
        self.noise[k][n]
    }

    /// `η̃_k^n = η_k^n / g_k^n`.
    pub fn normalized_noise(&self, k: usize, n: usize) -> f64 {
        self.noise[k][n] / self.gains[k][n]
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn p_max_sub(&self) -> &[f64] {
        &self.p_max_sub
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of non-zero power levels `J = ⌊P_max / δ⌋`.
    ///
    /// The quotient is nudged by a few ulps so that e.g. `10 / 0.01` yields
    /// 1000 rather than 999.
    pub fn levels(&self) -> usize {
        levels_for(self.p_max, self.delta)
    }

    /// Highest selectable level on subcarrier `n`: `min(J, ⌊P_max^n / δ⌋)`.
    pub fn level_cap(&self, n: usize) -> usize {
        levels_for(self.p_max_sub[n], self.delta).min(self.levels())
    }

    /// Power of level `l`, never above `P_max`.
    pub fn level_power(&self, l: usize) -> f64 {
        (l as f64 * self.delta).min(self.p_max)
    }

    /// One [`Carrier`] per subcarrier, in decoding order.
    pub fn carriers(&self) -> Vec<Carrier> {
        let order = DecodingOrder::new(self);
        (0..self.subcarriers()).map(|n| Carrier::new(self, &order, n)).collect()
    }
}

pub(crate) fn levels_for(budget: f64, delta: f64) -> usize {
    let q = budget / delta;
    (q * (1.0 + 4.0 * f64::EPSILON)).floor() as usize
}

/// Per-subcarrier SIC decoding permutations.
///
/// `perm[n][i]` is the user decoded at position `i`; `inv[n][k]` is the
/// position of user `k`. Users are sorted by non-increasing normalized noise,
/// ties broken by ascending user index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingOrder {
    perm: Vec<Vec<usize>>,
    inv: Vec<Vec<usize>>,
}

impl DecodingOrder {
    pub fn new(instance: &Instance) -> Self {
        let k = instance.users();
        let mut perm = Vec::with_capacity(instance.subcarriers());
        let mut inv = Vec::with_capacity(instance.subcarriers());
        for n in 0..instance.subcarriers() {
            let mut p: Vec<usize> = (0..k).collect();
            // sort_by is stable, so equal noises keep ascending user index
            p.sort_by(|&a, &b| {
                instance
                    .normalized_noise(b, n)
                    .partial_cmp(&instance.normalized_noise(a, n))
                    .expect("normalized noise is finite")
            });
            let mut q = vec![0; k];
            for (pos, &user) in p.iter().enumerate() {
                q[user] = pos;
            }
            perm.push(p);
            inv.push(q);
        }
        Self { perm, inv }
    }

    pub fn user_at(&self, n: usize, pos: usize) -> usize {
        self.perm[n][pos]
    }

    pub fn position_of(&self, n: usize, user: usize) -> usize {
        self.inv[n][user]
    }

    pub fn permutation(&self, n: usize) -> &[usize] {
        &self.perm[n]
    }
}

/// One subcarrier's parameters permuted into decoding order.
#[derive(Debug, Clone, PartialEq)]
pub struct Carrier {
    pub bandwidth: f64,
    /// `order[i]` is the user at decoding position `i`.
    pub order: Vec<usize>,
    /// Weight of the user at each position.
    pub weight: Vec<f64>,
    /// Normalized noise of the user at each position, non-increasing.
    pub noise: Vec<f64>,
}

impl Carrier {
    pub fn new(instance: &Instance, order: &DecodingOrder, n: usize) -> Self {
        let perm = order.permutation(n).to_vec();
        Self {
            bandwidth: instance.bandwidths()[n],
            weight: perm.iter().map(|&k| instance.weights()[k]).collect(),
            noise: perm.iter().map(|&k| instance.normalized_noise(k, n)).collect(),
            order: perm,
        }
    }

    pub fn users(&self) -> usize {
        self.weight.len()
    }

    /// The constant `A^n = W_n w_{π(K)} log2(1 / η̃_{π(K)})`.
    pub fn offset(&self) -> f64 {
        let last = self.users() - 1;
        -self.bandwidth * self.weight[last] * self.noise[last].log2()
    }

    /// `f_{j,i}(x)`: the sum of `f_j, …, f_i` when `x_j = … = x_i = x`.
    /// Positions are 0-based with `j <= i`.
    pub fn f(&self, j: usize, i: usize, x: f64) -> f64 {
        debug_assert!(j <= i && i < self.users());
        if j == 0 {
            ops::tick(3);
            self.bandwidth * self.weight[i] * (x + self.noise[i]).log2()
        } else {
            ops::tick(6);
            let b = j - 1;
            self.bandwidth
                * (self.weight[i] * (x + self.noise[i]).log2() - self.weight[b] * (x + self.noise[b]).log2())
        }
    }

    /// Maximizer of `f_{j,i}` on `[0, p_bar]`.
    ///
    /// `f_{j,i}` is increasing when `j == 0` or `w_i >= w_{j-1}`; otherwise it
    /// is unimodal with its peak at
    /// `c1 = (w_{j-1} η̃_i - w_i η̃_{j-1}) / (w_i - w_{j-1})`.
    pub fn argmax(&self, j: usize, i: usize, p_bar: f64) -> f64 {
        ops::tick(1);
        if j == 0 {
            return p_bar;
        }
        let (wa, wb) = (self.weight[i], self.weight[j - 1]);
        if wa >= wb {
            return p_bar;
        }
        ops::tick(6);
        let (na, nb) = (self.noise[i], self.noise[j - 1]);
        let c1 = (wb * na - wa * nb) / (wa - wb);
        c1.min(p_bar).max(0.0)
    }

    /// Derivative of `f_{0,l}` at `x`: `W w_l / ((x + η̃_l) ln 2)`.
    pub fn leading_slope(&self, l: usize, x: f64) -> f64 {
        self.bandwidth * self.weight[l] / ((x + self.noise[l]) * LN_2)
    }

    /// `Σ_i f_i(x_i) + A^n` for a full cumulative-power column.
    pub fn separable_value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.users());
        x.iter().enumerate().map(|(i, &xi)| self.f(i, i, xi)).sum::<f64>() + self.offset()
    }
}

/// Per-user transmit powers, indexed `[subcarrier][user]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub p: Vec<Vec<f64>>,
}

impl PowerAllocation {
    pub fn zeros(users: usize, subcarriers: usize) -> Self {
        Self { p: vec![vec![0.0; users]; subcarriers] }
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.p[n][k]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// Check C1–C4 against `instance`, allowing `tol` absolute slack on the
    /// power budgets.
    pub fn check_feasible(&self, instance: &Instance, tol: f64) -> Result<()> {
        if self.p.len() != instance.subcarriers() || self.p.iter().any(|r| r.len() != instance.users()) {
            return Err(Error::ConstraintViolation("allocation shape does not match instance".into()));
        }
        if self.p.iter().flatten().any(|&v| !(v >= 0.0)) {
            return Err(Error::ConstraintViolation("negative or NaN power".into()));
        }
        if self.total() > instance.p_max() + tol {
            return Err(Error::ConstraintViolation(format!(
                "total power {} exceeds budget {}",
                self.total(),
                instance.p_max()
            )));
        }
        for (n, row) in self.p.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if s > instance.p_max_sub()[n] + tol {
                return Err(Error::ConstraintViolation(format!("subcarrier {n} power {s} exceeds its limit")));
            }
            let active = row.iter().filter(|&&v| v > 0.0).count();
            if active > instance.max_multiplexed() {
                return Err(Error::ConstraintViolation(format!(
                    "subcarrier {n} has {active} active users, limit {}",
                    instance.max_multiplexed()
                )));
            }
        }
        Ok(())
    }
}

/// Cumulative powers `x_i^n = Σ_{j ≥ i} p^n_{π_n(j)}`, indexed `[subcarrier][position]`.
///
/// Alongside the cumulative values the allocation keeps the per-position
/// increments `x_i - x_{i+1}` it was built from, so converting powers to
/// cumulative form and back returns the original powers bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct XAllocation {
    x: Vec<Vec<f64>>,
    steps: Vec<Vec<f64>>,
}

impl XAllocation {
    /// Build from cumulative columns. Each column must be non-increasing and
    /// non-negative.
    pub fn from_columns(x: Vec<Vec<f64>>) -> Result<Self> {
        let mut steps = Vec::with_capacity(x.len());
        for (n, col) in x.iter().enumerate() {
            let mut s = Vec::with_capacity(col.len());
            for i in 0..col.len() {
                let next = col.get(i + 1).copied().unwrap_or(0.0);
                if !(col[i] >= next) || next < 0.0 {
                    return Err(Error::ConstraintViolation(format!(
                        "x on subcarrier {n} is not non-increasing and non-negative at position {i}"
                    )));
                }
                s.push(col[i] - next);
            }
            steps.push(s);
        }
        Ok(Self { x, steps })
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn column(&self, n: usize) -> &[f64] {
        &self.x[n]
    }

    /// Active positions `U'_n = {i : x_i > x_{i+1}}`.
    pub fn active_positions(&self, n: usize) -> Vec<usize> {
        self.steps[n].iter().enumerate().filter(|(_, &s)| s > 0.0).map(|(i, _)| i).collect()
    }
}

/// Convert per-user powers into cumulative form.
pub fn x_from_p(p: &PowerAllocation, order: &DecodingOrder) -> XAllocation {
    let mut x = Vec::with_capacity(p.p.len());
    let mut steps = Vec::with_capacity(p.p.len());
    for (n, row) in p.p.iter().enumerate() {
        let s: Vec<f64> = order.permutation(n).iter().map(|&k| row[k]).collect();
        let mut col = vec![0.0; s.len()];
        let mut acc = 0.0;
        for i in (0..s.len()).rev() {
            acc += s[i];
            col[i] = acc;
        }
        x.push(col);
        steps.push(s);
    }
    XAllocation { x, steps }
}

/// Convert cumulative powers back into per-user powers.
pub fn p_from_x(x: &XAllocation, order: &DecodingOrder) -> PowerAllocation {
    let p = x
        .steps
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let mut row = vec![0.0; s.len()];
            for (pos, &v) in s.iter().enumerate() {
                row[order.user_at(n, pos)] = v;
            }
            row
        })
        .collect();
    PowerAllocation { p }
}

/// Achievable rate of user `k` on subcarrier `n` under SIC, in bits/s.
pub fn rate(instance: &Instance, order: &DecodingOrder, p: &PowerAllocation, k: usize, n: usize) -> f64 {
    let pk = p.get(k, n);
    if pk <= 0.0 {
        return 0.0;
    }
    let pos = order.position_of(n, k);
    let interference: f64 = order.permutation(n)[pos + 1..].iter().map(|&j| p.get(j, n)).sum();
    let sinr = pk / (interference + instance.normalized_noise(k, n));
    instance.bandwidths()[n] * (1.0 + sinr).log2()
}

/// Weighted sum-rate from per-user SIC rates.
pub fn wsr_from_rates(instance: &Instance, order: &DecodingOrder, p: &PowerAllocation) -> f64 {
    (0..instance.users())
        .map(|k| instance.weights()[k] * (0..instance.subcarriers()).map(|n| rate(instance, order, p, k, n)).sum::<f64>())
        .sum()
}

/// Weighted sum-rate from the separable form `Σ_n Σ_i f_i^n(x_i^n) + A`.
pub fn wsr_separable(carriers: &[Carrier], x: &XAllocation) -> f64 {
    carriers.iter().zip(x.columns()).map(|(c, col)| c.separable_value(col)).sum()
}
