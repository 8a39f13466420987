//! Continuum-limit (`N → ∞`, `ΔE → 0`, `πH²/ΔE → γ`) propagator elements
//! and the weak decay laws built from them.

use std::f64::consts::PI;

use crate::error::{check_times, Error, Result};
use crate::weak::C64;

/// `U_00(t) = e^{−γt}`.
pub fn u00_limit(gamma: f64, t: f64) -> C64 {
    C64::new((-gamma * t).exp(), 0.0)
}

/// Interaction-picture `U_{n0}(t) = iH (e^{−γt + inΔEt} − 1) / (γ − inΔE)`
/// with `H = √(γΔE/π)`.
pub fn un0_limit(gamma: f64, delta_e: f64, n: i64, t: f64) -> C64 {
    let h = (gamma * delta_e / PI).sqrt();
    let e_n = n as f64 * delta_e;
    let i = C64::i();
    let growth = C64::new(-gamma * t, e_n * t).exp();
    i * h * (growth - 1.0) / C64::new(gamma, -e_n)
}

fn window(t_i: f64, t: f64, t_f: f64) -> Result<()> {
    check_times(t_i, t, t_f)?;
    if t_f == t_i {
        return Err(Error::DegenerateWindow);
    }
    Ok(())
}

/// Weak survival for a single emitted photon with energy offset
/// `e_diff = E_k − E_0`:
///
/// ```text
/// w = e^{−γ(t−t_i)} [1 − e^{(−γ + i e_diff)(t_f−t)}] / [1 − e^{(−γ + i e_diff)(t_f−t_i)}]
/// ```
///
/// At `e_diff = 0` this is the resonant law
/// `e^{−γ(t−t_i)} (1 − e^{−γ(t_f−t)}) / (1 − e^{−γ(t_f−t_i)})`.
pub fn weak_survival_single_photon(
    gamma: f64,
    e_diff: f64,
    t_i: f64,
    t: f64,
    t_f: f64,
) -> Result<C64> {
    window(t_i, t, t_f)?;
    let rate = C64::new(-gamma, e_diff);
    let numer = 1.0 - (rate * (t_f - t)).exp();
    let denom = 1.0 - (rate * (t_f - t_i)).exp();
    if denom.norm() == 0.0 {
        return Err(Error::ClosedFormSingular { denominator: 0.0 });
    }
    Ok((-gamma * (t - t_i)).exp() * numer / denom)
}

/// Weak survival when the asymptotic emission state is post-selected:
/// `e^{−γ(t−t_i)} (1 − e^{−2γ(t_f−t)}) / (1 − e^{−2γ(t_f−t_i)})`.
pub fn weak_survival_asymptotic_post(gamma: f64, t_i: f64, t: f64, t_f: f64) -> Result<C64> {
    window(t_i, t, t_f)?;
    // 1 − e^{−x} via exp_m1 keeps precision for short windows.
    let numer = -(-2.0 * gamma * (t_f - t)).exp_m1();
    let denom = -(-2.0 * gamma * (t_f - t_i)).exp_m1();
    if denom == 0.0 {
        return Err(Error::ClosedFormSingular { denominator: 0.0 });
    }
    Ok(C64::new((-gamma * (t - t_i)).exp() * numer / denom, 0.0))
}
