//! Built-in property suite behind `weakdecay check`.
//!
//! Each property is run independently and reports a measured figure next to
//! its threshold, so a failure says by how much it missed.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::RawConfig;
use super::scenario::run_scenario;
use crate::decay::{self, BathEigen, BathSpec, PostSpec};
use crate::error::Result;
use crate::lattice::{self, SumParams};
use crate::spin::{self, printed, Axis, PostChoice, SpinParams};
use crate::weak::{self, random, Operator, Propagator, StateVector, WeakValueQuery};
use crate::C64;

/// Default decay bath: γ = 1, ΔE = 0.1.
pub const GAMMA: f64 = 1.0;
pub const DELTA_E: f64 = 0.1;
/// Small bath used for dense checks, `N = 10` (dimension 22).
pub const SMALL_N: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub id: &'static str,
    /// Acceptance criterion this property belongs to.
    pub criterion: u8,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

pub struct Property {
    pub id: &'static str,
    pub criterion: u8,
    run: fn() -> Result<(bool, String)>,
}

impl Property {
    pub fn run(&self) -> PropertyReport {
        let start = std::time::Instant::now();
        let (pass, detail) = match (self.run)() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        PropertyReport {
            id: self.id,
            criterion: self.criterion,
            pass,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub fn properties() -> Vec<Property> {
    vec![
        Property {
            id: "spin-closed-forms",
            criterion: 1,
            run: spin_closed_forms,
        },
        Property {
            id: "spin-reductions",
            criterion: 2,
            run: spin_reductions,
        },
        Property {
            id: "weak-equals-strong",
            criterion: 3,
            run: weak_equals_strong,
        },
        Property {
            id: "exponential-law",
            criterion: 4,
            run: exponential_law,
        },
        Property {
            id: "exponential-law-trend",
            criterion: 4,
            run: exponential_law_trend,
        },
        Property {
            id: "single-photon-law",
            criterion: 5,
            run: single_photon_law,
        },
        Property {
            id: "asymptotic-post-law",
            criterion: 5,
            run: asymptotic_post_law,
        },
        Property {
            id: "decay-boundary-values",
            criterion: 5,
            run: decay_boundary_values,
        },
        Property {
            id: "long-window-limit",
            criterion: 6,
            run: long_window_limit,
        },
        Property {
            id: "complement-rule",
            criterion: 7,
            run: complement_rule,
        },
        Property {
            id: "undecayed-unity",
            criterion: 7,
            run: undecayed_unity,
        },
        Property {
            id: "bath-projector-sum",
            criterion: 7,
            run: bath_projector_sum,
        },
        Property {
            id: "bath-projector-signs",
            criterion: 7,
            run: bath_projector_signs,
        },
        Property {
            id: "lattice-limits",
            criterion: 8,
            run: lattice_limits,
        },
        Property {
            id: "lattice-order",
            criterion: 8,
            run: lattice_order,
        },
        Property {
            id: "decomposition",
            criterion: 9,
            run: decomposition,
        },
        Property {
            id: "determinism",
            criterion: 10,
            run: determinism,
        },
    ]
}

pub fn run_all() -> Vec<PropertyReport> {
    properties().iter().map(Property::run).collect()
}

pub fn run_criterion(criterion: u8) -> Vec<PropertyReport> {
    properties()
        .iter()
        .filter(|p| p.criterion == criterion)
        .map(Property::run)
        .collect()
}

fn verdict(measured: f64, limit: f64, what: &str) -> (bool, String) {
    (
        measured <= limit,
        format!("{what} {measured:.3e} (limit {limit:.0e})"),
    )
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| {
        if j + 1 == n {
            b
        } else {
            a + (b - a) * j as f64 / (n - 1) as f64
        }
    })
}

fn small_bath() -> BathSpec {
    BathSpec::with_gamma(SMALL_N, GAMMA, DELTA_E).expect("valid bath")
}

fn default_bath(n_half: usize) -> Result<BathSpec> {
    BathSpec::with_gamma(n_half, GAMMA, DELTA_E)
}

fn x_minus_weak(p: &SpinParams, t: f64) -> Result<f64> {
    Ok(spin::spin_weak_numeric(&PostChoice::XMinus, p, t, &Axis::XMinus.projector())?.re)
}

fn x_plus_weak(choice: &PostChoice, p: &SpinParams, t: f64) -> Result<C64> {
    spin::spin_weak_numeric(choice, p, t, &spin::p_x_plus())
}

/// Closed forms for each post-selection plus the two reduced setups, all
/// against the kernel with exact spin propagators.
fn spin_closed_forms() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    while draws < 1000 {
        let omega: f64 = rng.random_range(0.2..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let t_i: f64 = rng.random_range(-2.0..2.0);
        let t_f = t_i + rng.random_range(0.1..4.0);
        let t = rng.random_range(t_i..=t_f);
        let c = omega * (t_f - t_i) / 2.0;
        // Keep draws away from the singular windows of every closed form.
        if c.cos().abs() < 0.05 || c.sin().abs() < 0.05 || (c.cos() - c.sin()).abs() < 0.05 {
            continue;
        }
        draws += 1;
        let p = SpinParams::new(omega, t_i, t_f)?;
        for choice in [PostChoice::XPlus, PostChoice::XMinus, PostChoice::YPlus] {
            let closed = spin::spin_weak_closed(&choice, &p, t)?;
            worst = worst.max((closed - x_plus_weak(&choice, &p, t)?).norm());
        }
        worst = worst.max(
            (printed::weak_x_plus(omega, t_i, t, t_f) - x_plus_weak(&PostChoice::XPlus, &p, t)?.re)
                .abs(),
        );
        worst = worst.max((printed::weak_x_minus(omega, t_i, t, t_f) - x_minus_weak(&p, t)?).abs());

        // The reduced setups fix ω(t_f − t_i) and are written for ω > 0.
        let w = omega.abs();
        let frac = (t - t_i) / (t_f - t_i);
        let minus_x = SpinParams::with_phase(w, t_i, PI)?;
        let tm = t_i + frac * (minus_x.t_f - t_i);
        worst =
            worst.max((printed::strong_x_minus(w, t_i, tm) - x_minus_weak(&minus_x, tm)?).abs());

        let quarter = SpinParams::with_phase(w, t_i, FRAC_PI_2)?;
        let tq = t_i + frac * (quarter.t_f - t_i);
        let k = x_plus_weak(&PostChoice::XPlus, &quarter, tq)?;
        worst = worst.max((printed::quarter_turn_x_plus(w, t_i, tq) - k.re).abs() + k.im.abs());
    }
    Ok(verdict(
        worst,
        1e-10,
        "max |closed - kernel| over 1000 draws",
    ))
}

/// Full-cycle x+ post-selection reduces to the strong x+ law; the evolved −x
/// post-selection reduces to the strong x− law.
fn spin_reductions() -> Result<(bool, String)> {
    let (omega, t_i) = (1.3, 0.4);
    let full = SpinParams::with_phase(omega, t_i, 2.0 * PI)?;
    let half = SpinParams::with_phase(omega, t_i, PI)?;
    let mut worst: f64 = 0.0;
    for t in grid(t_i, full.t_f, 101) {
        worst = worst.max(
            (printed::weak_x_plus(omega, t_i, t, full.t_f) - printed::strong_x_plus(omega, t_i, t))
                .abs(),
        );
    }
    for t in grid(t_i, half.t_f, 101) {
        worst = worst.max(
            (printed::weak_x_minus(omega, t_i, t, half.t_f)
                - printed::strong_x_minus(omega, t_i, t))
            .abs(),
        );
    }
    Ok(verdict(
        worst,
        1e-10,
        "max reduction gap on 101-point grids",
    ))
}

fn weak_strong_gap(
    pre: &StateVector,
    a: &Operator,
    u_mid: &Propagator,
    u_late: &Propagator,
    t: f64,
    t_f: f64,
) -> Result<f64> {
    let u_total = u_late.compose(u_mid)?;
    let post = StateVector::normalized(u_total.apply(pre.amplitudes()).iter().copied().collect())?;
    let q = WeakValueQuery::new(pre.clone(), post, a.clone(), 0.0, t, t_f)?;
    let w = weak::weak_value(&q, u_mid, u_late)?;
    let strong = weak::strong_expectation(pre, a, u_mid)?;
    Ok((w - strong).norm())
}

/// Post-selecting the freely evolved state turns weak values into
/// expectation values.
fn weak_equals_strong() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bath = small_bath();
    let eigen = BathEigen::new(&bath)?;
    let up = StateVector::basis(bath.dim(), 0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (t, t_f) = (rng.random_range(0.0..2.0), 2.0);
        let omega = rng.random_range(-3.0..3.0);
        let a = random::hermitian(2, &mut rng);
        let gap = weak_strong_gap(
            &spin::x_plus(),
            &a,
            &spin::spin_propagator(omega, t),
            &spin::spin_propagator(omega, t_f - t),
            t,
            t_f,
        )?;
        worst = worst.max(gap);

        let a = random::hermitian(bath.dim(), &mut rng);
        let gap = weak_strong_gap(
            &up,
            &a,
            &eigen.propagator(t)?,
            &eigen.propagator(t_f - t)?,
            t,
            t_f,
        )?;
        worst = worst.max(gap);
    }
    Ok(verdict(
        worst,
        1e-10,
        "max |w - <A>| over 100 observables (dim 2 and 22)",
    ))
}

fn survival_error(n_half: usize) -> Result<f64> {
    let eigen = BathEigen::new(&default_bath(n_half)?)?;
    let mut worst: f64 = 0.0;
    for t in grid(0.0, 4.0 / GAMMA, 401) {
        worst = worst.max((eigen.survival_probability(t)? - (-2.0 * GAMMA * t).exp()).abs());
    }
    Ok(worst)
}

fn exponential_law() -> Result<(bool, String)> {
    Ok(verdict(
        survival_error(2000)?,
        0.01,
        "max ||U00|^2 - e^-2t| on [0, 4], N = 2000",
    ))
}

fn exponential_law_trend() -> Result<(bool, String)> {
    let levels = [250, 500, 1000, 2000];
    let errors = levels
        .iter()
        .map(|&n| survival_error(n))
        .collect::<Result<Vec<_>>>()?;
    let ok = super::sweep::trend(&errors) == super::sweep::Trend::Decreasing;
    let listed: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    Ok((
        ok,
        format!("errors along N = 250..2000: {}", listed.join(", ")),
    ))
}

fn decay_law_gap(post: PostSpec) -> Result<f64> {
    let bath = default_bath(2000)?;
    let eigen = BathEigen::new(&bath)?;
    let window = decay::WeakSurvivalWindow::new(&eigen, 0.0, 2.0, &post)?;
    let mut worst: f64 = 0.0;
    for t in grid(0.0, 2.0, 101) {
        let numeric = window.at(t)?;
        let limit = match post {
            PostSpec::AsymptoticEmission => {
                decay::weak_survival_asymptotic_post(GAMMA, 0.0, t, 2.0)?
            }
            _ => decay::weak_survival_single_photon(GAMMA, 0.0, 0.0, t, 2.0)?,
        };
        worst = worst.max((numeric - limit).norm());
    }
    Ok(worst)
}

fn single_photon_law() -> Result<(bool, String)> {
    Ok(verdict(
        decay_law_gap(PostSpec::SinglePhoton(0))?,
        0.01,
        "max |numeric - resonant law|, N = 2000",
    ))
}

fn asymptotic_post_law() -> Result<(bool, String)> {
    Ok(verdict(
        decay_law_gap(PostSpec::AsymptoticEmission)?,
        0.01,
        "max |numeric - asymptotic law|, N = 2000",
    ))
}

fn decay_boundary_values() -> Result<(bool, String)> {
    let eigen = BathEigen::new(&default_bath(2000)?)?;
    let mut numeric: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for post in [PostSpec::SinglePhoton(0), PostSpec::AsymptoticEmission] {
        numeric = numeric
            .max((decay::weak_survival_numeric_with(&eigen, 0.0, 0.0, 2.0, &post)? - 1.0).norm());
        numeric =
            numeric.max(decay::weak_survival_numeric_with(&eigen, 0.0, 2.0, 2.0, &post)?.norm());
    }
    for w in [
        decay::weak_survival_single_photon(GAMMA, 0.0, 0.0, 0.0, 2.0)? - 1.0,
        decay::weak_survival_single_photon(GAMMA, 0.0, 0.0, 2.0, 2.0)?,
        decay::weak_survival_asymptotic_post(GAMMA, 0.0, 0.0, 2.0)? - 1.0,
        decay::weak_survival_asymptotic_post(GAMMA, 0.0, 2.0, 2.0)?,
    ] {
        closed = closed.max(w.norm());
    }
    Ok((
        numeric <= 0.02 && closed == 0.0,
        format!(
            "numeric boundary gap {numeric:.3e} (limit 2e-2), closed-form gap {closed:.3e} (exact)"
        ),
    ))
}

fn long_window_limit() -> Result<(bool, String)> {
    let t_f = 50.0 / GAMMA;
    let mut worst: f64 = 0.0;
    for t in grid(0.0, 5.0, 101) {
        let target = (-GAMMA * t).exp();
        worst = worst
            .max((decay::weak_survival_single_photon(GAMMA, 0.0, 0.0, t, t_f)? - target).norm());
        worst =
            worst.max((decay::weak_survival_asymptotic_post(GAMMA, 0.0, t, t_f)? - target).norm());
    }
    Ok(verdict(worst, 1e-10, "max |law - e^-t| at t_f = 50"))
}

/// `w(A) + w(1 − A) = 1` for random pre/post on both systems.
fn complement_rule() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bath = small_bath();
    let eigen = BathEigen::new(&bath)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        for dim in [2, bath.dim()] {
            let pre = random::state(dim, &mut rng);
            let post = random::state(dim, &mut rng);
            let p = weak::projector_from_state(&random::state(dim, &mut rng))?;
            let rest = &Operator::identity(dim) - &p;
            let (u_mid, u_late) = if dim == 2 {
                (
                    spin::spin_propagator(1.1, 0.7),
                    spin::spin_propagator(1.1, 0.5),
                )
            } else {
                (eigen.propagator(0.7)?, eigen.propagator(0.5)?)
            };
            let w = |a: &Operator| -> Result<C64> {
                let q = WeakValueQuery::new(pre.clone(), post.clone(), a.clone(), 0.0, 0.7, 1.2)?;
                weak::weak_value(&q, &u_mid, &u_late)
            };
            worst = worst.max((w(&p)? + w(&rest)? - 1.0).norm());
        }
    }
    Ok(verdict(worst, 1e-10, "max |w(P) + w(1-P) - 1|"))
}

fn sum_rule_bath() -> Result<BathSpec> {
    default_bath(200)
}

fn undecayed_unity() -> Result<(bool, String)> {
    let eigen = BathEigen::new(&sum_rule_bath()?)?;
    let mut worst: f64 = 0.0;
    for t in grid(0.0, 2.0, 21) {
        let w = decay::weak_survival_numeric_with(&eigen, 0.0, t, 2.0, &PostSpec::Undecayed)?;
        worst = worst.max((w - 1.0).norm());
    }
    Ok(verdict(
        worst,
        1e-8,
        "max |w(P_up) - 1| with undecayed post-selection, N = 200",
    ))
}

fn bath_projector_sum() -> Result<(bool, String)> {
    let scan = decay::bath_weak_projector_scan(&sum_rule_bath()?, 0.0, 1.0, 2.0)?;
    let (ok, detail) = verdict(scan.sum.norm(), 1e-6, "|sum_n w(P_n)|, N = 200");
    let completeness = (scan.sum + scan.reference - 1.0).norm();
    Ok((
        ok,
        format!("{detail}; sum + w(P_up) - 1 = {completeness:.1e}"),
    ))
}

fn bath_projector_signs() -> Result<(bool, String)> {
    let scan = decay::bath_weak_projector_scan(&sum_rule_bath()?, 0.0, 1.0, 2.0)?;
    Ok((
        scan.min_re < 0.0 && scan.max_re > 0.0,
        format!("Re w(P_n) spans [{:.3e}, {:.3e}]", scan.min_re, scan.max_re),
    ))
}

fn lattice_limits() -> Result<(bool, String)> {
    let limit = 0.005 * PI / GAMMA;
    let p0 = SumParams::new(GAMMA, 0.01, 0.0, 1_000_000)?;
    let plain = (lattice::lorentzian_sum(&p0) - lattice::lorentzian_limit(GAMMA)).abs();
    let mut phased: f64 = 0.0;
    for t in [0.5, 1.0, 3.0] {
        let p = SumParams::new(GAMMA, 0.01, t, 1_000_000)?;
        phased = phased
            .max((lattice::phased_lorentzian_sum(&p) - lattice::phased_limit(GAMMA, t)).norm());
    }
    Ok((
        plain <= limit && phased <= limit,
        format!("|S0 - pi/g| {plain:.3e}, max |St - (pi/g)e^-gt| {phased:.3e} (limit {limit:.2e})"),
    ))
}

/// Error ratios under successive halvings of ΔE at a fixed energy cutoff.
fn lattice_order() -> Result<(bool, String)> {
    let levels = lattice::refinement_study(GAMMA, 1.0, 0.01, 4, 1e4)?;
    let ratios = lattice::error_ratios(&levels);
    let ok = ratios.iter().all(|r| (1.5..=2.5).contains(r));
    let listed: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    let errors: Vec<String> = levels.iter().map(|l| format!("{:.2e}", l.error)).collect();
    Ok((
        ok,
        format!(
            "ratios [{}] (need 1.5..2.5); errors [{}]",
            listed.join(", "),
            errors.join(", ")
        ),
    ))
}

fn decomposition() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let bath = small_bath();
    let eigen = BathEigen::new(&bath)?;
    let pre = StateVector::basis(bath.dim(), 0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = random::hermitian(bath.dim(), &mut rng);
        let u = eigen.propagator(rng.random_range(0.0..3.0))?;
        let basis = random::orthonormal_basis(bath.dim(), &mut rng);
        worst = worst.max(weak::decompose_expectation(&pre, &a, &u, &basis)?.residual);
    }
    Ok(verdict(
        worst,
        1e-8,
        "max |sum p_k w_k - <A>| over 100 bases (dim 22)",
    ))
}

fn determinism() -> Result<(bool, String)> {
    let mut raw = RawConfig::default();
    for (k, v) in [
        ("model", "decay"),
        ("n_half", "200"),
        ("post", "asymptotic"),
        ("n_points", "41"),
    ] {
        raw.set(k, v);
    }
    let config = raw
        .build()
        .map_err(|e| crate::Error::param("config", format!("{e:?}")))?;
    let first = run_scenario(&config)?.to_csv();
    let second = run_scenario(&config)?.to_csv();
    Ok((
        first == second,
        format!(
            "two runs, {} bytes each, identical: {}",
            first.len(),
            first == second
        ),
    ))
}
