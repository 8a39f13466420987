use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("post-selection overlap {overlap:.3e} is below the floor; weak value undefined")]
    PostSelectionNull { overlap: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (|norm^2 - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("state vector must be nonzero")]
    ZeroVector,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (max |U^dag U - 1| = {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("basis is not complete and orthonormal: {reason}")]
    BasisNotComplete { reason: String },

    #[error("expectation value has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("closed form is singular: denominator {denominator:.3e}")]
    ClosedFormSingular { denominator: f64 },

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("time {t} is beyond the recurrence guard {guard}")]
    BeyondRecurrence { t: f64, guard: f64 },

    #[error("degenerate post-selection window: t_f == t_i")]
    DegenerateWindow,

    #[error("invalid times: require t_i <= t <= t_f, got ({t_i}, {t}, {t_f})")]
    InvalidTimes { t_i: f64, t: f64, t_f: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    /// Stable variant name, used for row markers in harness output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::PostSelectionNull { .. } => "PostSelectionNull",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::ZeroVector => "ZeroVector",
            Error::NotSquare { .. } => "NotSquare",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::BasisNotComplete { .. } => "BasisNotComplete",
            Error::ImaginaryResidue { .. } => "ImaginaryResidue",
            Error::ClosedFormSingular { .. } => "ClosedFormSingular",
            Error::EigenFailure(_) => "EigenFailure",
            Error::BeyondRecurrence { .. } => "BeyondRecurrence",
            Error::DegenerateWindow => "DegenerateWindow",
            Error::InvalidTimes { .. } => "InvalidTimes",
            Error::InvalidParameter { .. } => "InvalidParameter",
        }
    }

    /// Failures of the numerics themselves rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure(_) | Error::NotUnitary { .. } | Error::ImaginaryResidue { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Checks `t_i <= t <= t_f` with all three finite.
pub(crate) fn check_times(t_i: f64, t: f64, t_f: f64) -> Result<()> {
    let finite = t_i.is_finite() && t.is_finite() && t_f.is_finite();
    if !finite || t_i > t || t > t_f {
        return Err(Error::InvalidTimes { t_i, t, t_f });
    }
    Ok(())
}
