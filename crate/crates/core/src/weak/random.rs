//! Seeded random states, observables and bases for property checks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Operator, Propagator, StateVector, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Haar-ish random normalized state.
pub fn state(dim: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..dim).map(|_| gaussian(rng)).collect();
    StateVector::normalized(amps).expect("gaussian vector is nonzero")
}

/// Random Hermitian matrix `(G + G†)/2` with Gaussian `G`.
pub fn hermitian(dim: usize, rng: &mut impl Rng) -> Operator {
    let g = gaussian_matrix(dim, rng);
    let h = (&g + g.adjoint()).map(|z| z * 0.5);
    Operator::new(h).expect("square by construction")
}

fn unitary_matrix(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    gaussian_matrix(dim, rng).qr().q()
}

/// Random unitary tagged with `duration`.
pub fn unitary_propagator(dim: usize, duration: f64, rng: &mut impl Rng) -> Propagator {
    Propagator::new(unitary_matrix(dim, rng), duration).expect("QR factor is unitary")
}

/// Columns of a random unitary as an orthonormal basis.
pub fn orthonormal_basis(dim: usize, rng: &mut impl Rng) -> Vec<StateVector> {
    let q = unitary_matrix(dim, rng);
    q.column_iter()
        .map(|c| StateVector::normalized(c.iter().copied().collect()).expect("unit column"))
        .collect()
}
