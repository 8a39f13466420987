//! Lorentzian lattice sums and their closed forms.
//!
//! ```text
//! S₀(ΔE)    = ΔE Σ_{|k|≤K} 1 / (γ² + k²ΔE²)            → π/γ
//! S_t(ΔE)   = ΔE Σ_{|k|≤K} e^{ikΔEt} / (γ² + k²ΔE²)     → (π/γ) e^{−γt}
//! ```
//!
//! For the untruncated sums the finite-ΔE values are known exactly:
//! `S₀ = (π/γ) coth(πγ/ΔE)` and, for `0 ≤ ΔE t ≤ 2π`,
//! `S_t = (π/γ) cosh[γ(π − ΔE t)/ΔE] / sinh(πγ/ΔE)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::weak::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumParams {
    pub gamma: f64,
    pub delta_e: f64,
    pub t: f64,
    pub k_max: u64,
}

impl SumParams {
    pub fn new(gamma: f64, delta_e: f64, t: f64, k_max: u64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param(
                "gamma",
                format!("must be positive, got {gamma}"),
            ));
        }
        if !(delta_e > 0.0 && delta_e.is_finite()) {
            return Err(Error::param(
                "delta_e",
                format!("must be positive, got {delta_e}"),
            ));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::param("t", format!("must be non-negative, got {t}")));
        }
        Ok(Self {
            gamma,
            delta_e,
            t,
            k_max,
        })
    }

    /// Truncation `K` chosen so that [`tail_bound`] is at most `tol`.
    pub fn with_tolerance(gamma: f64, delta_e: f64, t: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        Self::new(gamma, delta_e, t, (2.0 / (tol * delta_e)).ceil() as u64)
    }

    /// Whether `K ΔE ≥ 100 γ`, the regime the default tolerances assume.
    pub fn is_well_truncated(&self) -> bool {
        self.k_max as f64 * self.delta_e >= 100.0 * self.gamma
    }
}

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ΔE Σ_{k=−K}^{K} 1/(γ² + k²ΔE²)`.
pub fn lorentzian_sum(p: &SumParams) -> f64 {
    let g2 = p.gamma * p.gamma;
    // Summed from the small tail terms inwards; each ±k pair is one term.
    let pairs: CompensatedSum = (1..=p.k_max)
        .rev()
        .map(|k| {
            let x = k as f64 * p.delta_e;
            2.0 / (g2 + x * x)
        })
        .collect();
    p.delta_e * (pairs.value() + 1.0 / g2)
}

/// `ΔE Σ_{k=−K}^{K} e^{ikΔEt}/(γ² + k²ΔE²)`; `±k` terms are combined before
/// accumulation so their imaginary parts cancel pairwise.
pub fn phased_lorentzian_sum(p: &SumParams) -> C64 {
    let g2 = p.gamma * p.gamma;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for k in (1..=p.k_max).rev() {
        let x = k as f64 * p.delta_e;
        let w = 1.0 / (g2 + x * x);
        let (s_plus, c_plus) = (x * p.t).sin_cos();
        let (s_minus, c_minus) = (-x * p.t).sin_cos();
        re.add(w * (c_plus + c_minus));
        im.add(w * (s_plus + s_minus));
    }
    re.add(1.0 / g2);
    C64::new(p.delta_e * re.value(), p.delta_e * im.value())
}

/// `π/γ`.
pub fn lorentzian_limit(gamma: f64) -> f64 {
    PI / gamma
}

/// `(π/γ) e^{−γt}`.
pub fn phased_limit(gamma: f64, t: f64) -> f64 {
    PI / gamma * (-gamma * t).exp()
}

/// Untruncated `(π/γ) coth(πγ/ΔE)`.
pub fn lorentzian_closed(gamma: f64, delta_e: f64) -> f64 {
    let q = (-2.0 * PI * gamma / delta_e).exp();
    PI / gamma * (1.0 + q) / (1.0 - q)
}

/// Untruncated phased sum `(π/γ) cosh[γ(π − ΔEt)/ΔE] / sinh(πγ/ΔE)`, valid
/// for `0 ≤ ΔE t ≤ 2π`. Evaluated as
/// `(π/γ)(e^{−γt} + e^{γt − 2πγ/ΔE}) / (1 − e^{−2πγ/ΔE})` to avoid overflow.
pub fn phased_closed(gamma: f64, delta_e: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0 && delta_e * t <= 2.0 * PI) {
        return Err(Error::param(
            "t",
            format!(
                "closed form needs 0 <= ΔE t <= 2π, got ΔE t = {}",
                delta_e * t
            ),
        ));
    }
    let a = PI * gamma / delta_e;
    let b = gamma * t;
    Ok(PI / gamma * ((-b).exp() + (b - 2.0 * a).exp()) / (1.0 - (-2.0 * a).exp()))
}

/// Upper bound `2/(KΔE)` on `Σ_{|k|>K} ΔE/(γ² + k²ΔE²)`.
pub fn tail_bound(p: &SumParams) -> f64 {
    if p.k_max == 0 {
        return f64::INFINITY;
    }
    2.0 / (p.k_max as f64 * p.delta_e)
}

/// Integral estimate of the omitted tail of [`lorentzian_sum`],
/// `(2/γ)(π/2 − atan((K + ½)ΔE/γ))`.
pub fn tail_estimate(p: &SumParams) -> f64 {
    let edge = (p.k_max as f64 + 0.5) * p.delta_e / p.gamma;
    2.0 / p.gamma * (PI / 2.0 - edge.atan())
}

/// `coth` closed form minus the tail estimate: what the truncated sum should
/// reproduce.
pub fn lorentzian_truncated_reference(p: &SumParams) -> f64 {
    lorentzian_closed(p.gamma, p.delta_e) - tail_estimate(p)
}

/// One level of a ΔE refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub delta_e: f64,
    pub k_max: u64,
    pub value: C64,
    /// `|S_t(ΔE) − (π/γ)e^{−γt}|`.
    pub error: f64,
}

/// Halves ΔE `halvings` times starting at `delta_e0`, holding the energy
/// cutoff `K ΔE = cutoff` fixed, and records the error against the limit.
pub fn refinement_study(
    gamma: f64,
    t: f64,
    delta_e0: f64,
    halvings: usize,
    cutoff: f64,
) -> Result<Vec<RefinementLevel>> {
    (0..=halvings)
        .map(|j| {
            let delta_e = delta_e0 / f64::powi(2.0, j as i32);
            let k_max = (cutoff / delta_e).round() as u64;
            let p = SumParams::new(gamma, delta_e, t, k_max)?;
            let value = phased_lorentzian_sum(&p);
            Ok(RefinementLevel {
                delta_e,
                k_max,
                value,
                error: (value - phased_limit(gamma, t)).norm(),
            })
        })
        .collect()
}

/// Successive error ratios `err(ΔE)/err(ΔE/2)`; about 2 for first-order
/// convergence.
pub fn error_ratios(levels: &[RefinementLevel]) -> Vec<f64> {
    levels.windows(2).map(|w| w[0].error / w[1].error).collect()
}
