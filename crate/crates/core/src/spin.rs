//! Spin-½ precession about a field along z.
//!
//! The propagator is `U(t) = diag(e^{iωt/2}, e^{−iωt/2})`, the pre-selected
//! state is `|x+⟩` and the probed observable is the projector `P_{x+}`.
//! Closed forms below are derived against that propagator and agree with
//! the generic kernel; the [`printed`] submodule keeps the historical
//! expressions that disagree with it, for comparison.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_times, Error, Result};
use crate::weak::{self, Operator, Propagator, StateVector, WeakValueQuery, C64};

const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    pub omega: f64,
    pub t_i: f64,
    pub t_f: f64,
}

impl SpinParams {
    pub fn new(omega: f64, t_i: f64, t_f: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::param("omega", "must be finite"));
        }
        if !(t_i.is_finite() && t_f.is_finite() && t_i < t_f) {
            return Err(Error::param(
                "t_f",
                format!("need t_i < t_f, got {t_i} and {t_f}"),
            ));
        }
        Ok(Self { omega, t_i, t_f })
    }

    /// Window chosen so that `ω(t_f − t_i)` equals `phase`.
    pub fn with_phase(omega: f64, t_i: f64, phase: f64) -> Result<Self> {
        Self::new(omega, t_i, t_i + phase / omega)
    }
}

/// Post-selected final state.
#[derive(Debug, Clone, PartialEq)]
pub enum PostChoice {
    YPlus,
    XMinus,
    XPlus,
    Custom(StateVector),
}

impl PostChoice {
    pub fn state(&self) -> StateVector {
        match self {
            PostChoice::YPlus => y_plus(),
            PostChoice::XMinus => x_minus(),
            PostChoice::XPlus => x_plus(),
            PostChoice::Custom(s) => s.clone(),
        }
    }
}

/// Spin directions in the x-y plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    XPlus,
    YPlus,
    XMinus,
    YMinus,
}

impl Axis {
    pub fn state(self) -> StateVector {
        match self {
            Axis::XPlus => x_plus(),
            Axis::YPlus => y_plus(),
            Axis::XMinus => x_minus(),
            Axis::YMinus => y_minus(),
        }
    }

    pub fn projector(self) -> Operator {
        weak::projector_from_state(&self.state()).expect("axis states are normalized")
    }
}

fn spinor(a: C64, b: C64) -> StateVector {
    StateVector::new(vec![a, b]).expect("unit spinor")
}

pub fn x_plus() -> StateVector {
    spinor(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0))
}

pub fn x_minus() -> StateVector {
    spinor(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0))
}

/// `(1, i)/√2`; the same ray as `(i, −1)/√2`.
pub fn y_plus() -> StateVector {
    spinor(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2))
}

pub fn y_minus() -> StateVector {
    spinor(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2))
}

/// `P_{x+}`, all entries ½.
pub fn p_x_plus() -> Operator {
    Axis::XPlus.projector()
}

/// `diag(e^{iωt/2}, e^{−iωt/2})`.
pub fn spin_propagator(omega: f64, t: f64) -> Propagator {
    let half = omega * t / 2.0;
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::from_polar(1.0, half),
        C64::from_polar(1.0, -half),
    ]));
    Propagator::new(m, t).expect("diagonal phases are unitary")
}

fn singular_guard(denominator: f64) -> Result<()> {
    if denominator.abs() <= SINGULAR_TOL {
        return Err(Error::ClosedFormSingular { denominator });
    }
    Ok(())
}

/// Closed-form `w(P_{x+})` for pre-selection `|x+⟩`.
///
/// With `a = ω(t−t_i)/2`, `b = ω(t_f−t)/2`, `c = a + b`:
///
/// * `XPlus`:  `cos a cos b / cos c`
/// * `XMinus`: `½ − sin(a − b) / (2 sin c)`
/// * `YPlus`:  `cos a (cos b − sin b) / (cos c − sin c)`
///
/// `Custom` post-selections go through the numeric kernel.
pub fn spin_weak_closed(choice: &PostChoice, p: &SpinParams, t: f64) -> Result<C64> {
    check_times(p.t_i, t, p.t_f)?;
    let a = p.omega * (t - p.t_i) / 2.0;
    let b = p.omega * (p.t_f - t) / 2.0;
    let c = p.omega * (p.t_f - p.t_i) / 2.0;
    let value = match choice {
        PostChoice::XPlus => {
            singular_guard(c.cos())?;
            a.cos() * b.cos() / c.cos()
        }
        PostChoice::XMinus => {
            singular_guard(c.sin())?;
            0.5 - (a - b).sin() / (2.0 * c.sin())
        }
        PostChoice::YPlus => {
            let denom = c.cos() - c.sin();
            singular_guard(denom)?;
            a.cos() * (b.cos() - b.sin()) / denom
        }
        PostChoice::Custom(_) => return spin_weak_numeric(choice, p, t, &p_x_plus()),
    };
    Ok(C64::new(value, 0.0))
}

/// Weak value of `observable` from the generic kernel with exact spin
/// propagators.
pub fn spin_weak_numeric(
    choice: &PostChoice,
    p: &SpinParams,
    t: f64,
    observable: &Operator,
) -> Result<C64> {
    let q = WeakValueQuery::new(
        x_plus(),
        choice.state(),
        observable.clone(),
        p.t_i,
        t,
        p.t_f,
    )?;
    let u_mid = spin_propagator(p.omega, t - p.t_i);
    let u_late = spin_propagator(p.omega, p.t_f - t);
    weak::weak_value(&q, &u_mid, &u_late)
}

/// Strong expectation of the projector onto `axis` for pre-selection `|x+⟩`.
///
/// With `θ = ω(t − t_i)`: `x±` give `½(1 ± cos θ)`, `y±` give `½(1 ∓ sin θ)`.
pub fn spin_strong_closed(axis: Axis, omega: f64, t_i: f64, t: f64) -> Result<f64> {
    if !(t >= t_i) {
        return Err(Error::InvalidTimes {
            t_i,
            t,
            t_f: f64::INFINITY,
        });
    }
    let theta = omega * (t - t_i);
    Ok(match axis {
        Axis::XPlus => 0.5 * (1.0 + theta.cos()),
        Axis::XMinus => 0.5 * (1.0 - theta.cos()),
        Axis::YPlus => 0.5 * (1.0 - theta.sin()),
        Axis::YMinus => 0.5 * (1.0 + theta.sin()),
    })
}

/// Expressions as historically printed. Kept so the discrepancies with the
/// propagator above stay visible and tested.
pub mod printed {
    /// `cos a [cos b + sin b] / [cos c − sin c]`; disagrees with the kernel
    /// (numerator sign).
    pub fn weak_y_plus(omega: f64, t_i: f64, t: f64, t_f: f64) -> f64 {
        let a = omega * (t - t_i) / 2.0;
        let b = omega * (t_f - t) / 2.0;
        let c = omega * (t_f - t_i) / 2.0;
        a.cos() * (b.cos() + b.sin()) / (c.cos() - c.sin())
    }

    /// `½ + sin[ω(2t−t_i−t_f)/2] / (2 sin[ω(t_f−t_i)/2])`; equals
    /// `w(P_{x−})` for the `−x` post-selection.
    pub fn weak_x_minus(omega: f64, t_i: f64, t: f64, t_f: f64) -> f64 {
        0.5 + (omega * (2.0 * t - t_i - t_f) / 2.0).sin()
            / (2.0 * (omega * (t_f - t_i) / 2.0).sin())
    }

    /// `cos[ω(t−t_i)/2] cos[ω(t_f−t)/2] / cos[ω(t_f−t_i)/2]`.
    pub fn weak_x_plus(omega: f64, t_i: f64, t: f64, t_f: f64) -> f64 {
        (omega * (t - t_i) / 2.0).cos() * (omega * (t_f - t) / 2.0).cos()
            / (omega * (t_f - t_i) / 2.0).cos()
    }

    /// `½[1 + cos ω(t−t_i)]`.
    pub fn strong_x_plus(omega: f64, t_i: f64, t: f64) -> f64 {
        0.5 * (1.0 + (omega * (t - t_i)).cos())
    }

    /// `½[1 − sin ω(t−t_i)]`.
    pub fn strong_y_plus(omega: f64, t_i: f64, t: f64) -> f64 {
        0.5 * (1.0 - (omega * (t - t_i)).sin())
    }

    /// `½[1 − cos ω(t−t_i)]`.
    pub fn strong_x_minus(omega: f64, t_i: f64, t: f64) -> f64 {
        0.5 * (1.0 - (omega * (t - t_i)).cos())
    }

    /// `½[1 + sin ω(t−t_i) + cos ω(t−t_i)]`.
    pub fn quarter_turn_x_plus(omega: f64, t_i: f64, t: f64) -> f64 {
        0.5 * (1.0 + (omega * (t - t_i)).sin() + (omega * (t - t_i)).cos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn max_entry_diff(a: &Propagator, diag: [C64; 2]) -> f64 {
        let m = a.matrix();
        [
            (m[(0, 0)] - diag[0]).norm(),
            (m[(1, 1)] - diag[1]).norm(),
            m[(0, 1)].norm(),
            m[(1, 0)].norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    #[test]
    fn propagator_examples() {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        assert!(max_entry_diff(&spin_propagator(1.0, 0.0), [one, one]) < 1e-15);
        assert!(max_entry_diff(&spin_propagator(1.0, 2.0 * PI), [-one, -one]) < 1e-15);
        assert!(max_entry_diff(&spin_propagator(2.0, FRAC_PI_2), [i, -i]) < 1e-15);
    }

    #[test]
    fn composition_and_reversal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let omega = rng.random_range(-5.0..5.0);
            let (t1, t2, t3): (f64, f64, f64) = (
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let lhs = spin_propagator(omega, t1 - t2)
                .compose(&spin_propagator(omega, t2 - t3))
                .unwrap();
            assert!(lhs.max_diff(&spin_propagator(omega, t1 - t3)) <= 1e-10);
            let u = spin_propagator(omega, t1);
            assert!(u.adjoint().max_diff(&spin_propagator(omega, -t1)) <= 1e-10);
            assert!(u.unitarity_defect() <= 1e-10);
        }
    }

    #[test]
    fn full_cycle_reduces_to_strong_law() {
        let p = SpinParams::with_phase(1.0, 0.0, 2.0 * PI).unwrap();
        let w = spin_weak_closed(&PostChoice::XPlus, &p, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(w.re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.im, 0.0);
    }

    #[test]
    fn quarter_cycle_x_plus_excess() {
        let p = SpinParams::with_phase(1.0, 0.0, FRAC_PI_2).unwrap();
        let w = spin_weak_closed(&PostChoice::XPlus, &p, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(w.re, 0.5 * (1.0 + SQRT_2), epsilon = 1e-12);
        let k = spin_weak_numeric(&PostChoice::XPlus, &p, FRAC_PI_4, &p_x_plus()).unwrap();
        assert_abs_diff_eq!((w - k).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn evolved_minus_x_post_selection_matches_strong_minus_x() {
        // |x+⟩ reaches |x−⟩ after ω(t_f − t_i) = π under this propagator.
        let p = SpinParams::with_phase(1.0, 0.0, PI).unwrap();
        let w_plus = spin_weak_closed(&PostChoice::XMinus, &p, FRAC_PI_4).unwrap();
        let w_minus = 1.0 - w_plus.re;
        assert_abs_diff_eq!(w_minus, 0.5 * (1.0 - FRAC_PI_4.cos()), epsilon = 1e-12);
        assert_abs_diff_eq!(
            printed::weak_x_minus(1.0, 0.0, FRAC_PI_4, PI),
            w_minus,
            epsilon = 1e-12
        );
    }

    #[test]
    fn strong_closed_examples() {
        assert_abs_diff_eq!(spin_strong_closed(Axis::XPlus, 1.0, 0.0, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            spin_strong_closed(Axis::XPlus, 1.0, 0.0, PI).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            spin_strong_closed(Axis::YPlus, 1.0, 0.0, FRAC_PI_2).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(spin_strong_closed(Axis::XPlus, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn strong_closed_matches_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let omega = rng.random_range(-4.0..4.0);
            let t_i = rng.random_range(-2.0..2.0);
            let t = t_i + rng.random_range(0.0..5.0);
            for axis in [Axis::XPlus, Axis::YPlus, Axis::XMinus, Axis::YMinus] {
                let k = weak::strong_expectation(
                    &x_plus(),
                    &axis.projector(),
                    &spin_propagator(omega, t - t_i),
                )
                .unwrap();
                assert_abs_diff_eq!(
                    spin_strong_closed(axis, omega, t_i, t).unwrap(),
                    k,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn printed_forms_that_disagree_with_kernel() {
        let p = SpinParams::new(1.3, 0.0, 1.7).unwrap();
        let t = 0.6;
        let kernel = spin_weak_numeric(&PostChoice::YPlus, &p, t, &p_x_plus())
            .unwrap()
            .re;
        assert!((printed::weak_y_plus(1.3, 0.0, t, 1.7) - kernel).abs() > 1e-3);
        let strong_y = spin_strong_closed(Axis::YPlus, 1.3, 0.0, t).unwrap();
        assert_abs_diff_eq!(
            printed::strong_y_plus(1.3, 0.0, t),
            strong_y,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            printed::weak_x_plus(1.3, 0.0, t, 1.7),
            spin_weak_closed(&PostChoice::XPlus, &p, t).unwrap().re,
            epsilon = 1e-12
        );
    }

    #[test]
    fn singular_windows() {
        // cos c = 0 means post-selection |x+⟩ is orthogonal to the evolved state.
        let p = SpinParams::with_phase(1.0, 0.0, PI).unwrap();
        assert!(matches!(
            spin_weak_closed(&PostChoice::XPlus, &p, 1.0),
            Err(Error::ClosedFormSingular { .. })
        ));
        assert!(matches!(
            spin_weak_numeric(&PostChoice::XPlus, &p, 1.0, &p_x_plus()),
            Err(Error::PostSelectionNull { .. })
        ));
    }

    #[test]
    fn static_field() {
        let p = SpinParams::new(0.0, 0.0, 3.0).unwrap();
        for choice in [PostChoice::XPlus, PostChoice::YPlus] {
            let w = spin_weak_closed(&choice, &p, 1.2).unwrap();
            let k = spin_weak_numeric(&choice, &p, 1.2, &p_x_plus()).unwrap();
            assert_abs_diff_eq!((w - k).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(w.re, 1.0, epsilon = 1e-12);
        }
        assert!(spin_weak_closed(&PostChoice::XMinus, &p, 1.2).is_err());
    }

    #[test]
    fn custom_post_uses_kernel() {
        let post = StateVector::normalized(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.9)]).unwrap();
        let p = SpinParams::new(2.0, 0.0, 1.0).unwrap();
        let w = spin_weak_closed(&PostChoice::Custom(post.clone()), &p, 0.4).unwrap();
        let k = spin_weak_numeric(&PostChoice::Custom(post), &p, 0.4, &p_x_plus()).unwrap();
        assert_eq!(w, k);
    }

    #[test]
    fn invalid_params() {
        assert!(SpinParams::new(1.0, 2.0, 1.0).is_err());
        assert!(SpinParams::new(f64::NAN, 0.0, 1.0).is_err());
        let p = SpinParams::new(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            spin_weak_closed(&PostChoice::XPlus, &p, 1.5),
            Err(Error::InvalidTimes { .. })
        ));
    }
}
