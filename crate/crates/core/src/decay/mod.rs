//! Excited reference atom coupled to a finite equispaced bath, restricted to
//! the single-excitation sector.
//!
//! The exact finite-bath propagator comes from the arrowhead structure of
//! the Hamiltonian; [`limits`] holds the continuum-limit forms the numerics
//! converge to as the bath grows.

pub mod arrowhead;
mod bath;
pub mod limits;
mod weak;

pub use bath::{
    bath_propagator, build_hamiltonian, hamiltonian_matrix, survival_probability, BathEigen,
    BathSpec,
};
pub use limits::{
    u00_limit, un0_limit, weak_survival_asymptotic_post, weak_survival_single_photon,
};
pub use weak::{
    asymptotic_final_state, bath_weak_projector_scan, reference_projector, weak_survival_numeric,
    weak_survival_numeric_with, DecayQuery, PostSpec, ProjectorScan, WeakSurvivalWindow,
};
