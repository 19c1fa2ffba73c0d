#![allow(dead_code)]

use noma_jspa::model::{Carrier, Instance, InstanceData};
use noma_jspa::single_carrier::{scpc, ActiveSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const P_MAX: f64 = 10.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Synthetic instance with unit bandwidths, weights in [0.1, 1] and
/// normalized noise spread log-uniformly over [1e-3, 20], so that inactive
/// users, merged blocks and interior maximizers all show up.
pub fn random_instance(rng: &mut ChaCha8Rng, k: usize, n: usize, m: usize, levels: usize) -> Instance {
    let weights = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let gains = vec![vec![1.0; n]; k];
    let noise = (0..k)
        .map(|_| (0..n).map(|_| 10f64.powf(rng.random_range(-3.0..1.3))).collect())
        .collect();
    Instance::new(InstanceData {
        weights,
        bandwidths: vec![1.0; n],
        gains,
        noise,
        p_max: P_MAX,
        p_max_sub: None,
        delta: P_MAX / levels as f64,
        max_multiplexed: m,
    })
    .unwrap()
}

pub fn random_carrier(rng: &mut ChaCha8Rng, k: usize) -> Carrier {
    random_instance(rng, k, 1, 1, 10).carriers().remove(0)
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// All strictly increasing position sets of size at most `m`.
pub fn active_sets(users: usize, m: usize) -> Vec<ActiveSet> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << users) {
        if mask.count_ones() as usize <= m {
            let pos = (0..users).filter(|&i| mask >> i & 1 == 1).collect();
            out.push(ActiveSet::new(pos, users).unwrap());
        }
    }
    out
}

/// Best single-carrier value by enumerating active sets and solving each
/// with SCPC.
pub fn subset_oracle(carrier: &Carrier, m: usize, p_bar: f64) -> f64 {
    active_sets(carrier.users(), m)
        .iter()
        .map(|s| s.value(carrier, &scpc(carrier, s, p_bar)))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Maximum of the active-set objective over every grid point
/// `p_bar >= x_1 >= x_2 >= … >= 0` with `x_t ∈ {0, step, 2 step, …}`.
///
/// The objective is separable, so the grid maximum is a running prefix
/// maximum from the last block backwards.
pub fn ordered_grid_max(carrier: &Carrier, active: &ActiveSet, p_bar: f64, points: usize) -> f64 {
    let grid: Vec<f64> = (0..=points).map(|g| p_bar * g as f64 / points as f64).collect();
    let act = active.positions();
    let mut best_below = vec![0.0; grid.len()];
    for t in (0..act.len()).rev() {
        let mut running = f64::NEG_INFINITY;
        let mut next = vec![0.0; grid.len()];
        for (g, &x) in grid.iter().enumerate() {
            running = running.max(carrier.f(active.block_start(t), act[t], x) + best_below[g]);
            next[g] = running;
        }
        best_below = next;
    }
    best_below[points] + active.tail_constant(carrier)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Relative difference of two weighted sum-rates. The denominator is floored
/// at `Σ_n W_n max_k w_k`, one weighted bit per second per hertz, so that an
/// all-zero allocation compares cleanly against the round-off of the
/// separable form.
pub fn wsr_gap(inst: &Instance, a: f64, b: f64) -> f64 {
    let w = inst.weights().iter().cloned().fold(0.0, f64::max);
    let unit: f64 = inst.bandwidths().iter().map(|bw| bw * w).sum();
    (a - b).abs() / a.abs().max(b.abs()).max(unit)
}
