//! Basic-operation counting.
//!
//! Solvers call [`tick`] at fixed sites in their inner loops with the number of
//! additions, multiplications and comparisons performed there. Counting is
//! thread-local and only active inside [`count_ops`]; outside a counting scope
//! `tick` is a single thread-local flag check.
//!
//! Counting sites:
//!
//! | site | ops |
//! |------|-----|
//! | `argmax_f` | 1 branch comparison, plus 6 for the closed-form stationary point and clamp |
//! | `f_eval` | 3 (one log term) or 6 (two log terms) |
//! | SCPC merge step | 1 comparison per `while` test |
//! | SCUS recurrence cell | 4 (two additions, two comparisons) |
//! | i-SCUS entry evaluation | 2 per active block (truncation + accumulate) and 1 comparison per entry |
//! | DP-by-weights transition | 2 (addition + comparison) |
//! | DP-by-profits transition | 2 (addition + comparison) |
//! | projection | 3 per coordinate per bisection step |
//! | exhaustive search | 1 addition per enumerated budget vector component |

use std::cell::Cell;

thread_local! {
    static ACTIVE: Cell<bool> = const { Cell::new(false) };
    static COUNT: Cell<u64> = const { Cell::new(0) };
}

/// Record `n` basic operations if counting is enabled on this thread.
#[inline]
pub fn tick(n: u64) {
    ACTIVE.with(|active| {
        if active.get() {
            COUNT.with(|c| c.set(c.get() + n));
        }
    });
}

/// Whether a counting scope is currently open on this thread.
pub fn is_counting() -> bool {
    ACTIVE.with(Cell::get)
}

/// Run `f` and return its result together with the number of basic operations
/// it performed. Nested scopes each see their own count; the outer scope
/// includes the inner one.
pub fn count_ops<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let was_active = ACTIVE.with(|a| a.replace(true));
    let before = COUNT.with(Cell::get);
    let out = f();
    let after = COUNT.with(Cell::get);
    ACTIVE.with(|a| a.set(was_active));
    if !was_active {
        COUNT.with(|c| c.set(0));
    }
    (out, after - before)
}

/// Count the operations of `f` only if an enclosing scope is already counting;
/// returns 0 otherwise. Solvers use this to report their own share.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    if is_counting() {
        count_ops(f)
    } else {
        (f(), 0)
    }
}

/// Run `f` with counting enabled only when `enabled` is true; returns 0 otherwise.
pub fn count_ops_if<T>(enabled: bool, f: impl FnOnce() -> T) -> (T, u64) {
    if enabled {
        count_ops(f)
    } else {
        (f(), 0)
    }
}
