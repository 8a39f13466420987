//! Finite-bath weak values of the reference-atom projector `P_↑`.

use nalgebra::DVector;

use super::bath::{BathEigen, BathSpec};
use crate::error::{check_times, Error, Result};
use crate::weak::{self, Operator, StateVector, WeakValueQuery, C64, DENOM_FLOOR};

/// Post-selected final state at `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub enum PostSpec {
    /// Only bath atom `k` excited: a photon of energy `kΔE`.
    SinglePhoton(i64),
    /// The superposition the system approaches as `t → ∞`.
    AsymptoticEmission,
    /// The excited reference atom itself.
    Undecayed,
    /// Any normalized state; evaluated through the generic kernel with the
    /// Schrödinger-picture propagator.
    Custom(StateVector),
}

#[derive(Debug, Clone)]
pub struct DecayQuery {
    pub bath: BathSpec,
    pub t_i: f64,
    pub t: f64,
    pub t_f: f64,
    pub post: PostSpec,
}

impl DecayQuery {
    pub fn new(bath: BathSpec, t_i: f64, t: f64, t_f: f64, post: PostSpec) -> Result<Self> {
        check_times(t_i, t, t_f)?;
        Ok(Self {
            bath,
            t_i,
            t,
            t_f,
            post,
        })
    }
}

/// `P_↑`: one at the reference slot, zero elsewhere.
pub fn reference_projector(bath: &BathSpec) -> Operator {
    projector_on_slot(bath.dim(), 0)
}

fn projector_on_slot(dim: usize, slot: usize) -> Operator {
    weak::projector_from_state(&StateVector::basis(dim, slot).expect("slot in range"))
        .expect("unit vector")
}

/// Post-selection weights `1/(γ + ikΔE)` in slot order (reference slot 0).
fn emission_weights(bath: &BathSpec) -> Vec<C64> {
    (0..bath.dim())
        .map(|slot| match bath.bath_of_slot(slot) {
            None => C64::new(0.0, 0.0),
            Some(k) => 1.0 / C64::new(bath.gamma(), bath.bath_energy(k)),
        })
        .collect()
}

/// Interaction-picture ket approached as `t → ∞`, truncated to the finite
/// bath and normalized. Its bra components are `∝ iH/(γ + ikΔE)`; the ket
/// components are their conjugates `−iH/(γ − ikΔE)`. For `γ = 0` the
/// weight concentrates on the resonant photon, which is returned.
pub fn asymptotic_final_state(bath: &BathSpec) -> StateVector {
    let amps = emission_weights(bath)
        .into_iter()
        .map(|w| (C64::i() * w).conj())
        .collect();
    StateVector::normalized(amps)
        .or_else(|_| StateVector::basis(bath.dim(), bath.slot_of_bath(0)?))
        .expect("resonant slot exists")
}

fn null_check(overlap: C64) -> Result<()> {
    if !(overlap.norm() > DENOM_FLOOR) {
        return Err(Error::PostSelectionNull {
            overlap: overlap.norm(),
        });
    }
    Ok(())
}

/// Finite-bath weak value of `P_↑`, building the eigendecomposition.
pub fn weak_survival_numeric(q: &DecayQuery) -> Result<C64> {
    let eigen = BathEigen::new(&q.bath)?;
    weak_survival_numeric_with(&eigen, q.t_i, q.t, q.t_f, &q.post)
}

/// Finite-bath weak value of `P_↑` from a cached decomposition.
///
/// Photon post-selections use interaction-picture elements on both numerator
/// and denominator, `w = Ũ_{k0}(t_f−t) U_00(t−t_i) / Ũ_{k0}(t_f−t_i)`; the
/// asymptotic post-selection replaces `Ũ_{k0}` with `Σ_k Ũ_{k0}/(γ + ikΔE)`.
pub fn weak_survival_numeric_with(
    eigen: &BathEigen,
    t_i: f64,
    t: f64,
    t_f: f64,
    post: &PostSpec,
) -> Result<C64> {
    check_times(t_i, t, t_f)?;
    WeakSurvivalWindow::new(eigen, t_i, t_f, post)?.at(t)
}

/// A fixed `(t_i, t_f, post)` window whose denominator is computed once, for
/// evaluating many intermediate times.
pub struct WeakSurvivalWindow<'a> {
    eigen: &'a BathEigen,
    t_i: f64,
    t_f: f64,
    post: &'a PostSpec,
    weights: Vec<C64>,
    denom: C64,
}

impl<'a> WeakSurvivalWindow<'a> {
    pub fn new(eigen: &'a BathEigen, t_i: f64, t_f: f64, post: &'a PostSpec) -> Result<Self> {
        check_times(t_i, t_i, t_f)?;
        let bath = eigen.spec();
        bath.check_duration(t_f - t_i)?;
        let mut weights = Vec::new();
        let denom = match post {
            PostSpec::SinglePhoton(k) => {
                let denom = eigen.interaction_element(bath.slot_of_bath(*k)?, t_f - t_i);
                null_check(denom)?;
                denom
            }
            PostSpec::AsymptoticEmission => {
                weights = emission_weights(bath);
                let full = project(&weights, eigen.interaction_column(t_f - t_i));
                // Normalized overlap ⟨ψ_f|ψ(t_f)⟩ guards the denominator.
                let norm: f64 = weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
                null_check(full / norm)?;
                full
            }
            PostSpec::Undecayed => {
                let denom = eigen.survival_amplitude(t_f - t_i);
                null_check(denom)?;
                denom
            }
            PostSpec::Custom(state) => {
                if state.dim() != bath.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: bath.dim(),
                        found: state.dim(),
                    });
                }
                C64::new(1.0, 0.0)
            }
        };
        Ok(Self {
            eigen,
            t_i,
            t_f,
            post,
            weights,
            denom,
        })
    }

    pub fn at(&self, t: f64) -> Result<C64> {
        check_times(self.t_i, t, self.t_f)?;
        let (eigen, t_i, t_f) = (self.eigen, self.t_i, self.t_f);
        let bath = eigen.spec();
        let survival = eigen.survival_amplitude(t - t_i);
        match self.post {
            PostSpec::SinglePhoton(k) => {
                let slot = bath.slot_of_bath(*k)?;
                Ok(eigen.interaction_element(slot, t_f - t) * survival / self.denom)
            }
            PostSpec::AsymptoticEmission => Ok(survival
                * project(&self.weights, eigen.interaction_column(t_f - t))
                / self.denom),
            PostSpec::Undecayed => Ok(eigen.survival_amplitude(t_f - t) * survival / self.denom),
            PostSpec::Custom(state) => {
                let q = WeakValueQuery::new(
                    StateVector::basis(bath.dim(), 0)?,
                    state.clone(),
                    reference_projector(bath),
                    t_i,
                    t,
                    t_f,
                )?;
                weak::weak_value(&q, &eigen.propagator(t - t_i)?, &eigen.propagator(t_f - t)?)
            }
        }
    }
}

fn project(weights: &[C64], col: DVector<C64>) -> C64 {
    col.iter().zip(weights).map(|(a, w)| a * w).sum()
}

/// Weak values of every bath-atom projector for pre = post = excited
/// reference atom.
#[derive(Debug, Clone)]
pub struct ProjectorScan {
    /// `(k, w(P_{↑k}))` for `k = −N..=N`.
    pub values: Vec<(i64, C64)>,
    pub sum: C64,
    /// `w(P_↑)` for the reference atom under the same selection.
    pub reference: C64,
    pub min_re: f64,
    pub max_re: f64,
}

pub fn bath_weak_projector_scan(
    bath: &BathSpec,
    t_i: f64,
    t: f64,
    t_f: f64,
) -> Result<ProjectorScan> {
    check_times(t_i, t, t_f)?;
    bath.check_duration(t_f - t_i)?;
    let eigen = BathEigen::new(bath)?;
    let u_mid = eigen.propagator(t - t_i)?;
    let u_late = eigen.propagator(t_f - t)?;
    let psi0 = StateVector::basis(bath.dim(), 0)?;
    let weak_on = |slot: usize| -> Result<C64> {
        let q = WeakValueQuery::new(
            psi0.clone(),
            psi0.clone(),
            projector_on_slot(bath.dim(), slot),
            t_i,
            t,
            t_f,
        )?;
        weak::weak_value(&q, &u_mid, &u_late)
    };

    let mut values = Vec::with_capacity(bath.dim() - 1);
    for k in bath.bath_indices() {
        values.push((k, weak_on(bath.slot_of_bath(k)?)?));
    }
    let sum = values.iter().map(|(_, w)| w).sum();
    let (min_re, max_re) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, w)| {
            (lo.min(w.re), hi.max(w.re))
        });
    Ok(ProjectorScan {
        values,
        sum,
        reference: weak_on(0)?,
        min_re,
        max_re,
    })
}
