//! Grid evaluation of one scenario and its CSV / JSON rendering.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{
    DecayPost, DecayQuantity, DecayScenario, ModelConfig, ScenarioConfig, SpinObservable, SpinPost,
    SpinReference, SpinScenario, SumsReference, SumsScenario,
};
use crate::decay::{self, BathEigen, PostSpec};
use crate::error::{Error, Result};
use crate::lattice::{self, SumParams};
use crate::spin::{self, Axis, PostChoice};
use crate::C64;

pub const CSV_HEADER: &str = "t,value_re,value_im,reference_re,reference_im,abs_error";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub t: f64,
    /// `Err` carries the model error for this grid point only.
    pub value: std::result::Result<C64, Error>,
    pub reference: Option<C64>,
}

impl ResultRow {
    pub fn abs_error(&self) -> Option<f64> {
        match (&self.value, self.reference) {
            (Ok(v), Some(r)) => Some((v - r).norm()),
            _ => None,
        }
    }

    fn csv_line(&self, out: &mut String) {
        let none = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| v.to_string());
        let (vr, vi) = match &self.value {
            Ok(v) => (v.re.to_string(), v.im.to_string()),
            Err(_) => ("error".to_string(), "error".to_string()),
        };
        let abs = match &self.value {
            Err(e) => format!("error:{}", e.kind()),
            Ok(_) => none(self.abs_error()),
        };
        let _ = writeln!(
            out,
            "{},{vr},{vi},{},{},{abs}",
            self.t,
            none(self.reference.map(|r| r.re)),
            none(self.reference.map(|r| r.im)),
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub model: &'static str,
    pub rows: usize,
    pub row_errors: usize,
    pub max_abs_error: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when a row failed for numerical rather than input reasons.
    pub numerical_failure: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

impl ScenarioOutput {
    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        row.csv_line(&mut out);
    }
    out
}

pub fn summarize(model: &'static str, rows: &[ResultRow], tolerance: f64) -> Summary {
    let row_errors = rows.iter().filter(|r| r.value.is_err()).count();
    let numerical_failure = rows
        .iter()
        .any(|r| matches!(&r.value, Err(e) if e.is_numerical()));
    let max_abs_error = rows
        .iter()
        .filter_map(ResultRow::abs_error)
        .reduce(f64::max);
    let within = max_abs_error.is_none_or(|m| m <= tolerance);
    Summary {
        model,
        rows: rows.len(),
        row_errors,
        max_abs_error,
        tolerance,
        pass: row_errors == 0 && within,
        numerical_failure,
    }
}

/// Evaluates every grid point. Rows come back in grid order whatever the
/// evaluation order. Errors that invalidate the whole scenario (an
/// eigensolver failure, say) are returned as `Err`; per-point model errors
/// are kept in their rows.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let rows = match &config.model {
        ModelConfig::Spin(s) => spin_rows(s, config),
        ModelConfig::Decay(d) => decay_rows(d, d.n_half, config)?,
        ModelConfig::Sums(s) => sums_rows(s, config),
    };
    let summary = summarize(config.model.name(), &rows, config.tolerance);
    Ok(ScenarioOutput { rows, summary })
}

fn evaluate<F>(config: &ScenarioConfig, f: F) -> Vec<ResultRow>
where
    F: Fn(f64) -> (std::result::Result<C64, Error>, Option<C64>) + Sync,
{
    config
        .grid
        .points()
        .into_par_iter()
        .map(|t| {
            let (value, reference) = f(t);
            ResultRow {
                t,
                value,
                reference,
            }
        })
        .collect()
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn spin_rows(s: &SpinScenario, config: &ScenarioConfig) -> Vec<ResultRow> {
    let p = s.params;
    let choice = match s.post {
        SpinPost::XPlus => PostChoice::XPlus,
        SpinPost::XMinus => PostChoice::XMinus,
        SpinPost::YPlus => PostChoice::YPlus,
    };
    let observable = match s.observable {
        SpinObservable::PxPlus => Axis::XPlus.projector(),
        SpinObservable::PxMinus => Axis::XMinus.projector(),
    };
    evaluate(config, |t| {
        let value = spin::spin_weak_numeric(&choice, &p, t, &observable);
        let reference = match s.reference {
            SpinReference::None => None,
            SpinReference::Closed => {
                spin::spin_weak_closed(&choice, &p, t)
                    .ok()
                    .map(|w| match s.observable {
                        SpinObservable::PxPlus => w,
                        SpinObservable::PxMinus => 1.0 - w,
                    })
            }
            SpinReference::Printed => {
                let (w, ti, tf) = (p.omega, p.t_i, p.t_f);
                let printed = match s.post {
                    SpinPost::XPlus => spin::printed::weak_x_plus(w, ti, t, tf),
                    SpinPost::XMinus => spin::printed::weak_x_minus(w, ti, t, tf),
                    SpinPost::YPlus => spin::printed::weak_y_plus(w, ti, t, tf),
                };
                // The x− expression is the weak value of P_{x−}; the others
                // are of P_{x+}.
                let printed_is_minus = s.post == SpinPost::XMinus;
                let wants_minus = s.observable == SpinObservable::PxMinus;
                let v = if printed_is_minus == wants_minus {
                    printed
                } else {
                    1.0 - printed
                };
                v.is_finite().then(|| real(v))
            }
        };
        (value, reference)
    })
}

pub(crate) fn decay_rows(
    d: &DecayScenario,
    n_half: usize,
    config: &ScenarioConfig,
) -> Result<Vec<ResultRow>> {
    let bath = d.bath(n_half)?;
    let eigen = BathEigen::new(&bath)?;
    let gamma = bath.gamma();
    let rows = match d.quantity {
        DecayQuantity::Survival => evaluate(config, |t| {
            (
                eigen.survival_probability(t).map(real),
                Some(real((-2.0 * gamma * t).exp())),
            )
        }),
        DecayQuantity::Weak(post) => {
            let spec = match post {
                DecayPost::SinglePhoton(k) => PostSpec::SinglePhoton(k),
                DecayPost::Asymptotic => PostSpec::AsymptoticEmission,
                DecayPost::Undecayed => PostSpec::Undecayed,
            };
            let window = decay::WeakSurvivalWindow::new(&eigen, d.t_i, d.t_f, &spec);
            evaluate(config, |t| {
                let value = match &window {
                    Ok(w) => w.at(t),
                    Err(e) => Err(e.clone()),
                };
                let reference = match post {
                    DecayPost::SinglePhoton(k) => decay::weak_survival_single_photon(
                        gamma,
                        bath.bath_energy(k),
                        d.t_i,
                        t,
                        d.t_f,
                    )
                    .ok(),
                    DecayPost::Asymptotic => {
                        decay::weak_survival_asymptotic_post(gamma, d.t_i, t, d.t_f).ok()
                    }
                    DecayPost::Undecayed => Some(real(1.0)),
                };
                (value, reference)
            })
        }
    };
    Ok(rows)
}

fn sums_rows(s: &SumsScenario, config: &ScenarioConfig) -> Vec<ResultRow> {
    evaluate(config, |t| {
        let value = SumParams::new(s.gamma, s.delta_e, t, s.k_max)
            .map(|p| lattice::phased_lorentzian_sum(&p));
        let reference = match s.reference {
            SumsReference::Limit => Some(lattice::phased_limit(s.gamma, t)),
            SumsReference::Closed => lattice::phased_closed(s.gamma, s.delta_e, t).ok(),
        };
        (value, reference.map(real))
    })
}
