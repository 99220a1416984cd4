//! JSON configuration for sweeps and single runs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ckn_core::cylinder::GridSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ckn,
    Wlh,
}

/// `count` equispaced values from `min` to `max` inclusive; a bare number is a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    Single(f64),
    Span { min: f64, max: f64, count: usize },
}

impl Range {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            Range::Single(x) => Ok(vec![x]),
            Range::Span { min, max, count } => {
                if count == 0 {
                    bail!("range count must be at least 1");
                }
                if count == 1 {
                    return Ok(vec![min]);
                }
                let n = (count - 1) as f64;
                Ok((0..count)
                    .map(|i| {
                        let i = i as f64;
                        (min * (n - i) + max * i) / n
                    })
                    .collect())
            }
        }
    }
}

/// `θ` values, or `"critical"` for `θ = ϑ(p, d)` at every `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Named(Critical),
    Range(Range),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Critical {
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: Mode,
    pub d: i32,
    pub a: Range,
    #[serde(default)]
    pub p: Option<Range>,
    #[serde(default)]
    pub theta: Option<ThetaSpec>,
    #[serde(default)]
    pub gamma: Option<Range>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub run_minimizer: bool,
    /// Relative bisection tolerance for ground states.
    #[serde(default = "default_gs_tol")]
    pub ground_state_tol: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_gs_tol() -> f64 {
    ckn_core::ground_state::DEFAULT_TOL
}

impl SweepConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        self.a.values()?;
        match self.mode {
            Mode::Ckn => {
                self.p.context("ckn sweeps need a `p` range")?.values()?;
                if let Some(ThetaSpec::Range(r)) = self.theta {
                    r.values()?;
                }
                if self.theta.is_none() {
                    bail!("ckn sweeps need `theta` (a range or \"critical\")");
                }
            }
            Mode::Wlh => {
                self.gamma.context("wlh sweeps need a `gamma` range")?.values()?;
            }
        }
        self.grid.validate()?;
        Ok(())
    }
}

/// A single minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub mode: Mode,
    pub d: i32,
    pub a: f64,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Also minimize over `(s, ξ)` and compare with the radial run.
    #[serde(default)]
    pub detect_symmetry: bool,
    #[serde(default)]
    pub field_output: Option<PathBuf>,
    #[serde(default)]
    pub record_output: Option<PathBuf>,
}

impl MinimizeConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Parameter point for `constants`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsQuery {
    pub d: i32,
    pub a: f64,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}
