use crate::ops;

const BISECTION_STEPS: usize = 100;

/// Euclidean projection of `v` onto `{x : Σ x ≤ total, 0 ≤ x_n ≤ caps_n}`.
///
/// The solution is `x_n = clamp(v_n - λ, 0, caps_n)` for the smallest `λ ≥ 0`
/// meeting the sum constraint; `λ` is found by bisection.
pub fn project_simplex(v: &[f64], total: f64, caps: &[f64]) -> Vec<f64> {
    assert_eq!(v.len(), caps.len());
    let shifted = |lambda: f64| -> Vec<f64> {
        ops::tick(3 * v.len() as u64);
        v.iter().zip(caps).map(|(&x, &c)| (x - lambda).clamp(0.0, c)).collect()
    };
    let boxed = shifted(0.0);
    if boxed.iter().sum::<f64>() <= total {
        return boxed;
    }
    let mut lo = 0.0;
    let mut hi = v.iter().cloned().fold(0.0, f64::max);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if shifted(mid).iter().sum::<f64>() > total {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    shifted(hi)
}
