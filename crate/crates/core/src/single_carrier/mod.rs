//! Exact solvers for one subcarrier with a given power budget.
//!
//! [`scpc`] optimizes powers for a fixed active set in `O(M²)`; [`scus`] also
//! chooses which at most `M` users are active, in `O(MK²)`. Their
//! precomputed variants [`IScpc`] and [`IScus`] solve once at the full budget
//! and answer every lower budget by truncating stored solutions, which is what
//! the multi-carrier allocators call thousands of times.

mod scpc;
mod scus;

pub use scpc::{scpc, ActiveSet, IScpc};
pub use scus::{scus, CarrierSolution, IScus, ScusTables};
