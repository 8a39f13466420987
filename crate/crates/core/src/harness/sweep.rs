//! Convergence in N: the same decay scenario at increasing bath sizes.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ModelConfig, ScenarioConfig};
use super::scenario::{decay_rows, summarize};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str = "n_half,delta_e,max_abs_error,status";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepLevel {
    pub n_half: usize,
    pub delta_e: f64,
    pub max_abs_error: Option<f64>,
    /// `ok`, or the error kind that stopped this level.
    pub status: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    #[serde(rename = "decreasing")]
    Decreasing,
    #[serde(rename = "not_decreasing")]
    NotDecreasing,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub levels: Vec<SweepLevel>,
    pub trend: Trend,
    pub tolerance: f64,
    /// Finest completed level within tolerance and no upward trend.
    pub pass: bool,
}

impl SweepTable {
    /// Timing is left out so that the file is reproducible.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(SWEEP_HEADER);
        out.push('\n');
        for l in &self.levels {
            let err = l
                .max_abs_error
                .map_or_else(|| "none".to_string(), |e| e.to_string());
            let _ = writeln!(out, "{},{},{err},{}", l.n_half, l.delta_e, l.status);
        }
        out
    }
}

/// Errors decreasing along the levels, each step allowed to grow by at most
/// a factor of two, and the last strictly below the first.
pub fn trend(errors: &[f64]) -> Trend {
    if errors.len() < 2 {
        return Trend::NotApplicable;
    }
    let steps_ok = errors.windows(2).all(|w| w[1] <= 2.0 * w[0]);
    if steps_ok && errors[errors.len() - 1] < errors[0] {
        Trend::Decreasing
    } else {
        Trend::NotDecreasing
    }
}

pub fn convergence_sweep(base: &ScenarioConfig, levels: &[usize]) -> Result<SweepTable> {
    let ModelConfig::Decay(d) = &base.model else {
        return Err(Error::param(
            "model",
            "sweeps vary N and need model = decay",
        ));
    };
    if levels.is_empty() || !levels.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::param(
            "levels",
            "must be nonempty and strictly ascending",
        ));
    }
    let results: Vec<Result<SweepLevel>> = levels
        .par_iter()
        .map(|&n| {
            let delta_e = d.spacing.delta_e(n);
            let start = Instant::now();
            let outcome = level_error(base, n);
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(err) => Ok(SweepLevel {
                    n_half: n,
                    delta_e,
                    max_abs_error: err,
                    status: "ok".into(),
                    seconds,
                }),
                Err(e) if e.is_numerical() => Err(e),
                Err(e) => Ok(SweepLevel {
                    n_half: n,
                    delta_e,
                    max_abs_error: None,
                    status: e.kind().into(),
                    seconds,
                }),
            }
        })
        .collect();
    let levels = results.into_iter().collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = levels.iter().filter_map(|l| l.max_abs_error).collect();
    let trend = trend(&errors);
    let finest_ok = errors.last().is_some_and(|&e| e <= base.tolerance);
    Ok(SweepTable {
        pass: finest_ok && trend != Trend::NotDecreasing,
        levels,
        trend,
        tolerance: base.tolerance,
    })
}

/// Max grid error at one level. The first row error of the level is
/// returned as that level's status.
fn level_error(base: &ScenarioConfig, n_half: usize) -> Result<Option<f64>> {
    let ModelConfig::Decay(d) = &base.model else {
        unreachable!()
    };
    let rows = decay_rows(d, n_half, base)?;
    if let Some(Err(e)) = rows.iter().map(|r| &r.value).find(|v| v.is_err()) {
        return Err(e.clone());
    }
    Ok(summarize("decay", &rows, base.tolerance).max_abs_error)
}
