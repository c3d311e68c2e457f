//! JSON scenario description shared by the CLI subcommands.
//!
//! ```json
//! {
//!   "problem": {
//!     "alpha": 0.5, "tau_q_alpha": 0.5, "rho": 1, "c": 1, "a": 1,
//!     "length": 1, "conductivity": 1, "final_time": 1,
//!     "u0": "sin_pi_over_L", "v0": "zero", "source": "zero"
//!   },
//!   "spectral": { "n_modes": 20 },
//!   "rothe": { "element_count": [32, 64], "step_count": [32, 64] },
//!   "output": { "directory": "out", "precision": 17 }
//! }
//! ```
//!
//! Profiles are either a preset name, `{"preset": name, "scale": s}`, or
//! `{"samples": [..]}` (uniform samples on `[0, L]`, linearly interpolated).
//! `source` profiles are constant in time. `conductivity` is a number or a
//! list of values on equal subintervals of `[0, L]`; each mesh element takes
//! the value at its midpoint.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::TimeGrid;
use crate::params::ModelParams;
use crate::rothe::Mesh1D;
use crate::spectral::SpectralConfig;

pub const PRESETS: [&str; 4] = ["sin_pi_over_L", "bump", "zero", "const"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Preset(String),
    Scaled { preset: String, scale: f64 },
    Samples { samples: Vec<f64> },
}

impl Profile {
    pub fn preset(name: &str) -> Self {
        Profile::Preset(name.to_string())
    }

    fn validate(&self, what: &str) -> Result<()> {
        match self {
            Profile::Preset(p) | Profile::Scaled { preset: p, .. } if !PRESETS.contains(&p.as_str()) => {
                Err(Error::config(format!(
                    "{what}: unknown preset \"{p}\" (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
            Profile::Scaled { scale, .. } if !scale.is_finite() => {
                Err(Error::config(format!("{what}: scale must be finite")))
            }
            Profile::Samples { samples } if samples.len() < 2 => {
                Err(Error::config(format!("{what}: need at least 2 samples")))
            }
            Profile::Samples { samples } if samples.iter().any(|v| !v.is_finite()) => {
                Err(Error::config(format!("{what}: samples must be finite")))
            }
            _ => Ok(()),
        }
    }

    /// True when the profile vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Preset(p) => p == "zero",
            Profile::Scaled { preset, scale } => preset == "zero" || *scale == 0.0,
            Profile::Samples { samples } => samples.iter().all(|v| *v == 0.0),
        }
    }

    /// Value at `x ∈ [0, L]`.
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        let named = |p: &str| match p {
            "sin_pi_over_L" => (PI * x / length).sin(),
            "bump" => {
                let s = x / length * (1.0 - x / length);
                16.0 * s * s
            }
            "const" => 1.0,
            _ => 0.0,
        };
        match self {
            Profile::Preset(p) => named(p),
            Profile::Scaled { preset, scale } => scale * named(preset),
            Profile::Samples { samples } => {
                let last = samples.len() - 1;
                let pos = (x / length).clamp(0.0, 1.0) * last as f64;
                let j = (pos.floor() as usize).min(last - 1);
                let w = pos - j as f64;
                (1.0 - w) * samples[j] + w * samples[j + 1]
            }
        }
    }

    pub fn sample(&self, xs: &[f64], length: f64) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x, length)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Conductivity {
    Constant(f64),
    PerElement(Vec<f64>),
}

impl Conductivity {
    pub fn constant(&self) -> Option<f64> {
        match self {
            Conductivity::Constant(k) => Some(*k),
            Conductivity::PerElement(ks) if ks.iter().all(|k| *k == ks[0]) => Some(ks[0]),
            Conductivity::PerElement(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub alpha: f64,
    pub tau_q_alpha: f64,
    pub rho: f64,
    pub c: f64,
    pub a: f64,
    pub length: f64,
    pub conductivity: Conductivity,
    pub final_time: f64,
    pub u0: Profile,
    pub v0: Profile,
    #[serde(default = "zero_profile")]
    pub source: Profile,
}

fn zero_profile() -> Profile {
    Profile::preset("zero")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralBlock {
    pub n_modes: usize,
    #[serde(default)]
    pub quad_points: Option<usize>,
    /// Evaluation grid for the `spectral` subcommand.
    #[serde(default = "default_x_points")]
    pub x_points: usize,
    #[serde(default = "default_t_points")]
    pub t_points: usize,
}

fn default_x_points() -> usize {
    51
}

fn default_t_points() -> usize {
    11
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementCount {
    Single(usize),
    List(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotheBlock {
    pub element_count: ElementCount,
    pub step_count: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    /// Significant digits in CSV output.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_precision() -> usize {
    17
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: default_directory(),
            precision: default_precision(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub problem: ProblemBlock,
    pub spectral: SpectralBlock,
    pub rothe: RotheBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::config(format!("invalid scenario JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// The reference scenario: `L = k̄ = ρ = c = a = T = 1`, `τ_q^α = 1/2`,
    /// `α = 1/2`, `U0 = sin(πx)`, `V0 = F = 0`, 20 modes.
    pub fn reference() -> Self {
        ScenarioConfig {
            problem: ProblemBlock {
                alpha: 0.5,
                tau_q_alpha: 0.5,
                rho: 1.0,
                c: 1.0,
                a: 1.0,
                length: 1.0,
                conductivity: Conductivity::Constant(1.0),
                final_time: 1.0,
                u0: Profile::preset("sin_pi_over_L"),
                v0: Profile::preset("zero"),
                source: Profile::preset("zero"),
            },
            spectral: SpectralBlock {
                n_modes: 20,
                quad_points: None,
                x_points: default_x_points(),
                t_points: default_t_points(),
            },
            rothe: RotheBlock {
                element_count: ElementCount::List(vec![32, 64, 128, 256]),
                step_count: vec![32, 64, 128, 256],
            },
            output: OutputBlock::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        self.model_params().map_err(|e| Error::config(e.to_string()))?;
        if !(p.length > 0.0 && p.length.is_finite()) {
            return Err(Error::config("problem.length must be > 0"));
        }
        if !(p.final_time > 0.0 && p.final_time.is_finite()) {
            return Err(Error::config("problem.final_time must be > 0"));
        }
        match &p.conductivity {
            Conductivity::Constant(k) if !(*k > 0.0 && k.is_finite()) => {
                return Err(Error::config("problem.conductivity must be > 0"));
            }
            Conductivity::PerElement(ks) if ks.is_empty() || ks.iter().any(|k| !(*k > 0.0 && k.is_finite())) => {
                return Err(Error::config("problem.conductivity entries must be > 0"));
            }
            _ => {}
        }
        p.u0.validate("problem.u0")?;
        p.v0.validate("problem.v0")?;
        p.source.validate("problem.source")?;
        if self.spectral.n_modes == 0 {
            return Err(Error::config("spectral.n_modes must be >= 1"));
        }
        if self.spectral.quad_points.is_some_and(|q| q < 3) {
            return Err(Error::config("spectral.quad_points must be >= 3"));
        }
        if self.spectral.x_points < 2 || self.spectral.t_points < 1 {
            return Err(Error::config("spectral.x_points must be >= 2 and t_points >= 1"));
        }
        let steps = &self.rothe.step_count;
        if steps.is_empty() || steps.contains(&0) {
            return Err(Error::config("rothe.step_count must be a non-empty list of positive integers"));
        }
        if steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("rothe.step_count must be strictly increasing"));
        }
        match &self.rothe.element_count {
            ElementCount::Single(m) if *m < 2 => return Err(Error::config("rothe.element_count must be >= 2")),
            ElementCount::List(ms) if ms.len() != steps.len() => {
                return Err(Error::config(
                    "rothe.element_count list must have the same length as rothe.step_count",
                ))
            }
            ElementCount::List(ms) if ms.iter().any(|m| *m < 2) => {
                return Err(Error::config("rothe.element_count entries must be >= 2"))
            }
            _ => {}
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(Error::config("output.precision must be in 1..=17"));
        }
        Ok(())
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        let p = &self.problem;
        ModelParams::new(p.alpha, p.tau_q_alpha, p.rho, p.c, p.a)
    }

    /// `(n, M)` pairs of the refinement study.
    pub fn refinements(&self) -> Vec<(usize, usize)> {
        match &self.rothe.element_count {
            ElementCount::Single(m) => self.rothe.step_count.iter().map(|&n| (n, *m)).collect(),
            ElementCount::List(ms) => self.rothe.step_count.iter().copied().zip(ms.iter().copied()).collect(),
        }
    }

    pub fn grid(&self, steps: usize) -> Result<TimeGrid> {
        TimeGrid::new(self.problem.final_time, steps)
    }

    pub fn mesh(&self, elements: usize) -> Result<Mesh1D> {
        let len = self.problem.length;
        match &self.problem.conductivity {
            Conductivity::Constant(k) => Mesh1D::uniform(len, elements, *k),
            Conductivity::PerElement(ks) => {
                let per = (0..elements)
                    .map(|e| {
                        let mid = (e as f64 + 0.5) / elements as f64;
                        ks[((mid * ks.len() as f64) as usize).min(ks.len() - 1)]
                    })
                    .collect();
                Mesh1D::with_conductivity(len, per)
            }
        }
    }

    /// Spectral configuration; fails unless the conductivity is constant.
    pub fn spectral_config(&self) -> Result<SpectralConfig> {
        let k = self
            .problem
            .conductivity
            .constant()
            .ok_or_else(|| Error::config("spectral ground truth requires constant conductivity"))?;
        let cfg = SpectralConfig::new(self.problem.length, k, self.model_params()?, self.spectral.n_modes)?;
        Ok(match self.spectral.quad_points {
            Some(q) => cfg.with_quad_points(q),
            None => cfg,
        })
    }

    /// Uniform evaluation grids `(xs, ts)` of the `spectral` subcommand.
    pub fn spectral_eval_grid(&self) -> (Vec<f64>, Vec<f64>) {
        let lin = |n: usize, end: f64| -> Vec<f64> {
            if n == 1 {
                return vec![end];
            }
            (0..n)
                .map(|j| if j + 1 == n { end } else { j as f64 * end / (n - 1) as f64 })
                .collect()
        };
        (
            lin(self.spectral.x_points, self.problem.length),
            lin(self.spectral.t_points, self.problem.final_time),
        )
    }
}
