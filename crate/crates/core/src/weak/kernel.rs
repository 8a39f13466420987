use nalgebra::{DMatrix, DVector};

use super::{Operator, Propagator, StateVector, C64, HERMITIAN_TOL, NORM_TOL};
use crate::error::{check_times, Error, Result};

/// Post-selection overlaps at or below this magnitude are rejected.
pub const DENOM_FLOOR: f64 = 1e-12;

const IMAG_RESIDUE_TOL: f64 = 1e-10;
const GRAM_TOL: f64 = 1e-10;

/// Pre-state, post-state, observable and the three times of a weak probe.
#[derive(Debug, Clone)]
pub struct WeakValueQuery {
    pub pre: StateVector,
    pub post: StateVector,
    pub observable: Operator,
    pub t_i: f64,
    pub t: f64,
    pub t_f: f64,
}

impl WeakValueQuery {
    pub fn new(
        pre: StateVector,
        post: StateVector,
        observable: Operator,
        t_i: f64,
        t: f64,
        t_f: f64,
    ) -> Result<Self> {
        check_times(t_i, t, t_f)?;
        let dim = pre.dim();
        if post.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: post.dim(),
            });
        }
        observable.check_dim(dim)?;
        Ok(Self {
            pre,
            post,
            observable,
            t_i,
            t,
            t_f,
        })
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }
}

fn check_duration(name: &'static str, u: &Propagator, expected: f64) -> Result<()> {
    let scale = 1.0_f64.max(expected.abs());
    if (u.duration() - expected).abs() > 1e-9 * scale {
        return Err(Error::param(
            name,
            format!("spans {} but the query needs {}", u.duration(), expected),
        ));
    }
    Ok(())
}

/// Weak value `⟨ψ_f|U(t_f−t) A U(t−t_i)|ψ_i⟩ / ⟨ψ_f|U(t_f−t_i)|ψ_i⟩`.
///
/// `u_mid` spans `t − t_i` and `u_late` spans `t_f − t`. The denominator is
/// evaluated as `⟨ψ_f|u_late·u_mid|ψ_i⟩` so that numerator and denominator
/// go through the same products.
pub fn weak_value(q: &WeakValueQuery, u_mid: &Propagator, u_late: &Propagator) -> Result<C64> {
    let dim = q.dim();
    u_mid.check_dim(dim)?;
    u_late.check_dim(dim)?;
    check_duration("u_mid", u_mid, q.t - q.t_i)?;
    check_duration("u_late", u_late, q.t_f - q.t)?;

    let evolved = u_mid.apply(q.pre.amplitudes());
    let denom = q.post.inner(&u_late.apply(&evolved));
    if !(denom.norm() > DENOM_FLOOR) {
        return Err(Error::PostSelectionNull {
            overlap: denom.norm(),
        });
    }
    let numer = q.post.inner(&u_late.apply(&q.observable.apply(&evolved)));
    Ok(numer / denom)
}

/// `⟨ψ_i|U† A U|ψ_i⟩` for Hermitian `A`.
pub fn strong_expectation(pre: &StateVector, observable: &Operator, u: &Propagator) -> Result<f64> {
    let dim = pre.dim();
    observable.check_dim(dim)?;
    u.check_dim(dim)?;
    let deviation = observable.hermitian_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let evolved = u.apply(pre.amplitudes());
    let value = evolved.dotc(&observable.apply(&evolved));
    if value.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue {
            residue: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// One post-selected sub-ensemble in an expectation-value decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTerm {
    /// `|⟨ψ_f,k|Uψ_i⟩|²`.
    pub probability: f64,
    /// `None` when the probability is below `DENOM_FLOOR²`.
    pub weak_value: Option<C64>,
    /// `p_k · w_k`, formed from unnormalized overlaps.
    pub weighted: C64,
}

#[derive(Debug, Clone)]
pub struct ExpectationDecomposition {
    pub terms: Vec<DecompositionTerm>,
    /// `⟨Uψ_i|A|Uψ_i⟩` computed directly.
    pub expectation: C64,
    /// `|Σ_k p_k w_k − ⟨A⟩|`.
    pub residual: f64,
}

impl ExpectationDecomposition {
    pub fn weighted_sum(&self) -> C64 {
        self.terms.iter().map(|t| t.weighted).sum()
    }
}

/// Splits `⟨A⟩` at the end of `u` into post-selected contributions over a
/// complete orthonormal basis.
pub fn decompose_expectation(
    pre: &StateVector,
    observable: &Operator,
    u: &Propagator,
    basis: &[StateVector],
) -> Result<ExpectationDecomposition> {
    let dim = pre.dim();
    observable.check_dim(dim)?;
    u.check_dim(dim)?;
    check_basis(basis, dim)?;

    let evolved = u.apply(pre.amplitudes());
    let a_evolved = observable.apply(&evolved);
    let expectation = evolved.dotc(&a_evolved);

    let floor_sq = DENOM_FLOOR * DENOM_FLOOR;
    let terms: Vec<_> = basis
        .iter()
        .map(|f| {
            let overlap = f.inner(&evolved);
            let a_overlap = f.inner(&a_evolved);
            let probability = overlap.norm_sqr();
            let weak_value = (probability > floor_sq).then(|| a_overlap / overlap);
            DecompositionTerm {
                probability,
                weak_value,
                weighted: overlap.conj() * a_overlap,
            }
        })
        .collect();

    let total: C64 = terms.iter().map(|t| t.weighted).sum();
    Ok(ExpectationDecomposition {
        residual: (total - expectation).norm(),
        terms,
        expectation,
    })
}

fn check_basis(basis: &[StateVector], dim: usize) -> Result<()> {
    if basis.len() != dim {
        return Err(Error::BasisNotComplete {
            reason: format!("{} vectors for dimension {dim}", basis.len()),
        });
    }
    if let Some(bad) = basis.iter().find(|b| b.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let columns: Vec<DVector<C64>> = basis.iter().map(|b| b.amplitudes().clone()).collect();
    let m = DMatrix::from_columns(&columns);
    let gram = m.adjoint() * &m;
    let identity = DMatrix::<C64>::identity(dim, dim);
    let deviation = super::operator::max_abs_diff(&gram, &identity);
    if deviation > GRAM_TOL {
        return Err(Error::BasisNotComplete {
            reason: format!("Gram matrix deviates from identity by {deviation:.3e}"),
        });
    }
    Ok(())
}

/// Rank-one projector `|s⟩⟨s|`.
pub fn projector_from_state(s: &StateVector) -> Result<Operator> {
    let deviation = (s.norm_squared() - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    let v = s.amplitudes();
    Operator::new(v * v.adjoint())
}
