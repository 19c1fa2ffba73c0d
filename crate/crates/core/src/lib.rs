//! Weighted sum-rate maximization for downlink multi-carrier NOMA under a
//! total power budget.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: instances, SIC decoding order, rates and the separable
//!   cumulative-power reformulation.
//! * [`channel`]: seeded random cell instances (path loss, shadowing, Rayleigh).
//! * [`single_carrier`]: exact power control and user selection on one
//!   subcarrier, with precomputed variants.
//! * [`jspa`]: joint subcarrier and power allocation across subcarriers:
//!   the pseudo-polynomial optimum, an FPTAS and a projected-gradient heuristic.
//! * [`ops`]: basic-operation counting for complexity measurements.
//!
//! ```
//! use noma_jspa::channel::{generate_instance, ChannelConfig};
//! use noma_jspa::jspa::Prepared;
//!
//! let cfg = ChannelConfig { users: 4, subcarriers: 3, delta_w: 0.5, ..Default::default() };
//! let instance = generate_instance(&cfg, 7).unwrap();
//! let prepared = Prepared::new(&instance);
//! let best = prepared.opt_jspa();
//! let fast = prepared.eps_jspa(0.1);
//! assert!(fast.wsr >= 0.9 * best.wsr);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod jspa;
pub mod model;
pub mod ops;
pub mod single_carrier;

pub use error::{Error, Result};

/// The guide's chapters, compiled as doctests so their snippets stay correct.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    pub mod model {}
    #[doc = include_str!("../../../book/src/single_carrier.md")]
    pub mod single_carrier {}
    #[doc = include_str!("../../../book/src/joint_allocation.md")]
    pub mod joint_allocation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
