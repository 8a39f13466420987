//! Time-dependent weak values for pre- and post-selected two-level systems.
//!
//! * [`weak`]: state/operator algebra and the weak-value kernel.
//! * [`spin`]: spin-½ precession with closed-form weak values.
//! * [`decay`]: an excited atom decaying into a finite equispaced bath.
//! * [`lattice`]: the Lorentzian lattice sums behind the continuum limit.
//! * [`harness`]: scenarios, sweeps, CSV/JSON output and the built-in checks.

// `!(x > 0.0)` guards are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod spin;
pub mod weak;

pub use error::{Error, Result};
pub use weak::C64;
