//! Flat `key = value` scenario configuration.
//!
//! ```text
//! # decay run against the resonant single-photon law
//! model = decay
//! n_half = 2000
//! delta_e = 0.1
//! gamma = 1
//! t_i = 0
//! t_f = 2
//! quantity = weak
//! post = single_photon
//! ```
//!
//! Every key can be overridden with `--set key=value`; overrides are applied
//! after the file, in order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::decay::BathSpec;
use crate::lattice::SumParams;
use crate::spin::SpinParams;

const KNOWN_KEYS: &[&str] = &[
    "model",
    "t_start",
    "t_end",
    "n_points",
    "tolerance",
    "out",
    "levels",
    "omega",
    "phase",
    "t_i",
    "t_f",
    "post",
    "observable",
    "reference",
    "n_half",
    "delta_e",
    "bandwidth",
    "gamma",
    "coupling",
    "quantity",
    "photon",
    "k_max",
];

/// One problem with one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinPost {
    XPlus,
    XMinus,
    YPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinObservable {
    PxPlus,
    PxMinus,
}

/// Comparator for spin rows: the kernel-consistent closed forms or the
/// historically printed expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinReference {
    Closed,
    Printed,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinScenario {
    pub params: SpinParams,
    pub post: SpinPost,
    pub observable: SpinObservable,
    pub reference: SpinReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayPost {
    SinglePhoton(i64),
    Asymptotic,
    Undecayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayQuantity {
    /// `|U_00(t)|²` against `e^{−2γt}`.
    Survival,
    /// Weak value of `P_↑` against the matching limit law.
    Weak(DecayPost),
}

/// How ΔE follows N when a sweep changes N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Fixed(f64),
    /// `ΔE = bandwidth / N`.
    Bandwidth(f64),
}

impl Spacing {
    pub fn delta_e(self, n_half: usize) -> f64 {
        match self {
            Spacing::Fixed(de) => de,
            Spacing::Bandwidth(w) => w / n_half as f64,
        }
    }
}

/// Coupling strength as given: either γ or H directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Gamma(f64),
    Coupling(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayScenario {
    pub n_half: usize,
    pub spacing: Spacing,
    pub strength: Strength,
    pub t_i: f64,
    pub t_f: f64,
    pub quantity: DecayQuantity,
}

impl DecayScenario {
    pub fn bath(&self, n_half: usize) -> crate::Result<BathSpec> {
        let de = self.spacing.delta_e(n_half);
        match self.strength {
            Strength::Gamma(g) => BathSpec::with_gamma(n_half, g, de),
            Strength::Coupling(h) => BathSpec::new(n_half, de, h),
        }
    }

    pub fn gamma(&self) -> f64 {
        match self.strength {
            Strength::Gamma(g) => g,
            Strength::Coupling(h) => {
                std::f64::consts::PI * h * h / self.spacing.delta_e(self.n_half)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumsReference {
    /// `(π/γ) e^{−γt}`.
    Limit,
    /// Exact finite-ΔE value of the untruncated sum.
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumsScenario {
    pub gamma: f64,
    pub delta_e: f64,
    pub k_max: u64,
    pub reference: SumsReference,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Spin(SpinScenario),
    Decay(DecayScenario),
    Sums(SumsScenario),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Spin(_) => "spin",
            ModelConfig::Decay(_) => "decay",
            ModelConfig::Sums(_) => "sums",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    /// Evenly spaced points with both endpoints hit exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|j| {
                if j == last {
                    self.end
                } else {
                    self.start + (self.end - self.start) * j as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub grid: TimeGrid,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    /// Sweep levels (values of N), ascending.
    pub levels: Vec<usize>,
}

/// Raw key/value pairs, before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, Vec<FieldError>> {
        let mut raw = RawConfig::default();
        let mut errors = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Err(e) = raw.set_pair(line) {
                errors.push(FieldError {
                    field: format!("line {}", lineno + 1),
                    message: e.message,
                });
            }
        }
        if errors.is_empty() {
            Ok(raw)
        } else {
            Err(errors)
        }
    }

    /// Applies one `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), FieldError> {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(FieldError {
                field: pair.trim().to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(FieldError {
                field: key.to_string(),
                message: "unknown key".into(),
            });
        }
        self.entries
            .insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn build(&self) -> Result<ScenarioConfig, Vec<FieldError>> {
        let mut b = Builder {
            raw: self,
            errors: Vec::new(),
        };
        let config = b.scenario();
        match config {
            Some(c) if b.errors.is_empty() => Ok(c),
            _ => Err(b.errors),
        }
    }
}

struct Builder<'a> {
    raw: &'a RawConfig,
    errors: Vec<FieldError>,
}

impl Builder<'_> {
    fn fail(&mut self, field: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            field: field.to_string(),
            message: message.into(),
        });
    }

    fn real(&mut self, key: &str, default: Option<f64>) -> Option<f64> {
        match self.raw.get(key) {
            None => {
                if default.is_none() {
                    self.fail(key, "required");
                }
                default
            }
            Some(s) => match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Some(x),
                _ => {
                    self.fail(key, format!("not a finite number: `{s}`"));
                    None
                }
            },
        }
    }

    fn count<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Option<T> {
        match self.raw.get(key) {
            None => Some(default),
            Some(s) => match s.parse::<T>() {
                Ok(x) => Some(x),
                Err(_) => {
                    self.fail(key, format!("not an integer: `{s}`"));
                    None
                }
            },
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, default: &str, options: &[(&str, T)]) -> Option<T> {
        let s = self.raw.get(key).unwrap_or(default);
        match options.iter().find(|(name, _)| *name == s) {
            Some((_, v)) => Some(*v),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.fail(key, format!("`{s}` is not one of {}", names.join(", ")));
                None
            }
        }
    }

    fn scenario(&mut self) -> Option<ScenarioConfig> {
        let model_name = self.raw.get("model").unwrap_or("").to_string();
        let (model, default_window, default_tol) = match model_name.as_str() {
            "spin" => self.spin().map(|s| {
                let w = (s.params.t_i, s.params.t_f);
                (ModelConfig::Spin(s), Some(w), 1e-10)
            })?,
            "decay" => self.decay().map(|d| {
                let w = match d.quantity {
                    DecayQuantity::Survival => (0.0, 4.0 / d.gamma()),
                    DecayQuantity::Weak(_) => (d.t_i, d.t_f),
                };
                (ModelConfig::Decay(d), Some(w), 0.01)
            })?,
            "sums" => self.sums().map(|s| {
                let tol = 0.005 * std::f64::consts::PI / s.gamma;
                (ModelConfig::Sums(s), Some((0.0, 3.0)), tol)
            })?,
            "" => {
                self.fail("model", "required (spin, decay or sums)");
                return None;
            }
            other => {
                self.fail(
                    "model",
                    format!("`{other}` is not one of spin, decay, sums"),
                );
                return None;
            }
        };
        let (t0, t1) = default_window.unwrap_or((0.0, 1.0));
        let start = self.real("t_start", Some(t0));
        let end = self.real("t_end", Some(t1));
        let n_points = self.count::<usize>("n_points", 101);
        let tolerance = self.real("tolerance", Some(default_tol));
        let out = self.raw.get("out").map(PathBuf::from);
        let levels = self.levels();
        let (start, end, n_points, tolerance) = (start?, end?, n_points?, tolerance?);

        if n_points < 2 {
            self.fail("n_points", format!("must be at least 2, got {n_points}"));
        }
        if start > end {
            self.fail(
                "t_end",
                format!("must not precede t_start ({end} < {start})"),
            );
        }
        if !(tolerance > 0.0) {
            self.fail("tolerance", "must be positive");
        }
        let window = match &model {
            ModelConfig::Spin(s) => Some((s.params.t_i, s.params.t_f)),
            ModelConfig::Decay(DecayScenario {
                quantity: DecayQuantity::Weak(_),
                t_i,
                t_f,
                ..
            }) => Some((*t_i, *t_f)),
            ModelConfig::Decay(_) => {
                if start < 0.0 {
                    self.fail("t_start", "survival times must be non-negative");
                }
                None
            }
            ModelConfig::Sums(_) => {
                if start < 0.0 {
                    self.fail("t_start", "sum times must be non-negative");
                }
                None
            }
        };
        if let Some((t_i, t_f)) = window {
            if start < t_i {
                self.fail("t_start", format!("{start} precedes t_i = {t_i}"));
            }
            if end > t_f {
                self.fail("t_end", format!("{end} exceeds t_f = {t_f}"));
            }
        }
        Some(ScenarioConfig {
            model,
            grid: TimeGrid {
                start,
                end,
                n_points,
            },
            tolerance,
            out,
            levels: levels?,
        })
    }

    fn levels(&mut self) -> Option<Vec<usize>> {
        let Some(s) = self.raw.get("levels") else {
            return Some(Vec::new());
        };
        let parsed: Result<Vec<usize>, _> =
            s.split(',').map(|x| x.trim().parse::<usize>()).collect();
        match parsed {
            Ok(v) if v.windows(2).all(|w| w[0] < w[1]) && !v.is_empty() && v[0] > 0 => Some(v),
            Ok(_) => {
                self.fail("levels", "must be positive and strictly ascending");
                None
            }
            Err(_) => {
                self.fail(
                    "levels",
                    format!("expected comma-separated integers, got `{s}`"),
                );
                None
            }
        }
    }

    fn spin(&mut self) -> Option<SpinScenario> {
        let omega = self.real("omega", Some(1.0));
        let t_i = self.real("t_i", Some(0.0));
        let t_f = match (self.raw.get("t_f"), self.raw.get("phase")) {
            (Some(_), Some(_)) => {
                self.fail("phase", "give either t_f or phase, not both");
                None
            }
            (None, Some(_)) => {
                let phase = self.real("phase", None);
                match (omega, t_i, phase) {
                    (Some(w), Some(ti), Some(ph)) if w != 0.0 => Some(ti + ph / w),
                    (Some(_), _, _) => {
                        self.fail("phase", "needs a nonzero omega");
                        None
                    }
                    _ => None,
                }
            }
            _ => self.real("t_f", Some(1.0)),
        };
        let post = self.choice(
            "post",
            "y_plus",
            &[
                ("x_plus", SpinPost::XPlus),
                ("x_minus", SpinPost::XMinus),
                ("y_plus", SpinPost::YPlus),
            ],
        );
        let observable = self.choice(
            "observable",
            "p_x_plus",
            &[
                ("p_x_plus", SpinObservable::PxPlus),
                ("p_x_minus", SpinObservable::PxMinus),
            ],
        );
        let reference = self.choice(
            "reference",
            "closed",
            &[
                ("closed", SpinReference::Closed),
                ("printed", SpinReference::Printed),
                ("none", SpinReference::None),
            ],
        );
        let (omega, t_i, t_f) = (omega?, t_i?, t_f?);
        let params = match SpinParams::new(omega, t_i, t_f) {
            Ok(p) => p,
            Err(e) => {
                self.fail("t_f", e.to_string());
                return None;
            }
        };
        Some(SpinScenario {
            params,
            post: post?,
            observable: observable?,
            reference: reference?,
        })
    }

    fn decay(&mut self) -> Option<DecayScenario> {
        let n_half = self.count::<usize>("n_half", 2000);
        let spacing = match (self.raw.get("delta_e"), self.raw.get("bandwidth")) {
            (Some(_), Some(_)) => {
                self.fail("bandwidth", "give either delta_e or bandwidth, not both");
                None
            }
            (None, Some(_)) => self.real("bandwidth", None).map(Spacing::Bandwidth),
            _ => self.real("delta_e", Some(0.1)).map(Spacing::Fixed),
        };
        let strength = match (self.raw.get("gamma"), self.raw.get("coupling")) {
            (Some(_), Some(_)) => {
                self.fail("coupling", "give either gamma or coupling, not both");
                None
            }
            (None, Some(_)) => self.real("coupling", None).map(Strength::Coupling),
            _ => self.real("gamma", Some(1.0)).map(Strength::Gamma),
        };
        let t_i = self.real("t_i", Some(0.0));
        let t_f = self.real("t_f", Some(2.0));
        let photon = self.count::<i64>("photon", 0);
        let post = self.choice(
            "post",
            "single_photon",
            &[
                ("single_photon", 0u8),
                ("asymptotic", 1u8),
                ("undecayed", 2u8),
            ],
        );
        let quantity = self.choice("quantity", "weak", &[("weak", true), ("survival", false)]);
        let (n_half, spacing, strength, t_i, t_f, photon) =
            (n_half?, spacing?, strength?, t_i?, t_f?, photon?);
        let quantity = if quantity? {
            DecayQuantity::Weak(match post? {
                0 => DecayPost::SinglePhoton(photon),
                1 => DecayPost::Asymptotic,
                _ => DecayPost::Undecayed,
            })
        } else {
            DecayQuantity::Survival
        };
        if t_i >= t_f {
            self.fail("t_f", format!("must exceed t_i ({t_f} <= {t_i})"));
        }
        let scenario = DecayScenario {
            n_half,
            spacing,
            strength,
            t_i,
            t_f,
            quantity,
        };
        match scenario.bath(n_half) {
            Ok(bath) => {
                if let DecayQuantity::Weak(DecayPost::SinglePhoton(k)) = quantity {
                    if bath.slot_of_bath(k).is_err() {
                        self.fail("photon", format!("{k} is outside -{n_half}..={n_half}"));
                    }
                }
            }
            Err(e) => self.fail("n_half", e.to_string()),
        }
        Some(scenario)
    }

    fn sums(&mut self) -> Option<SumsScenario> {
        let gamma = self.real("gamma", Some(1.0));
        let delta_e = self.real("delta_e", Some(0.01));
        let k_max = self.count::<u64>("k_max", 1_000_000);
        let reference = self.choice(
            "reference",
            "limit",
            &[
                ("limit", SumsReference::Limit),
                ("closed", SumsReference::Closed),
            ],
        );
        let (gamma, delta_e, k_max) = (gamma?, delta_e?, k_max?);
        if let Err(e) = SumParams::new(gamma, delta_e, 0.0, k_max) {
            self.fail("gamma", e.to_string());
            return None;
        }
        Some(SumsScenario {
            gamma,
            delta_e,
            k_max,
            reference: reference?,
        })
    }
}
