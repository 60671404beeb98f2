//! Requirements-driven test generation for closed-loop driving scenarios.
//!
//! The crate monitors Signal Temporal Logic requirements with robust
//! semantics ([`monitor`]), builds mixed-strength covering arrays over
//! scenario parameters ([`covering_array`]) and searches for requirement
//! violations by minimizing robustness over built-in simulators
//! ([`optimizer`], [`scenario`]).

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering_array;
pub mod ext_real;
pub mod monitor;
pub mod optimizer;
pub mod requirements;
pub mod rng;
pub mod scenario;
pub mod stl;
pub mod trace;
