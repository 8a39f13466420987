//! Model-agnostic state and operator algebra plus the weak-value kernel.
//!
//! A weak value for pre-selection `|ψ_i⟩` at `t_i`, post-selection `|ψ_f⟩`
//! at `t_f` and an observable `A` probed at `t_i ≤ t ≤ t_f` is
//!
//! ```text
//! w(A) = ⟨ψ_f| U(t_f − t) A U(t − t_i) |ψ_i⟩ / ⟨ψ_f| U(t_f − t_i) |ψ_i⟩
//! ```
//!
//! All matrices are dense; model-specific structure is exploited by the
//! model modules before a [`Propagator`] is handed to the kernel.

mod kernel;
mod operator;
pub mod random;
mod state;

pub use kernel::{
    decompose_expectation, projector_from_state, strong_expectation, weak_value, DecompositionTerm,
    ExpectationDecomposition, WeakValueQuery, DENOM_FLOOR,
};
pub use operator::{Operator, Propagator};
pub use state::StateVector;

pub type C64 = num_complex::Complex64;

/// Tolerance for the normalization check on pre- and post-selected states.
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise tolerance for Hermiticity of observables.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Entrywise tolerance for `U†U = 1`.
pub const UNITARY_TOL: f64 = 1e-10;
