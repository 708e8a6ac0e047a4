//! Run configuration: one TOML document with `model`, `initial`,
//! `numerics` and `outputs` sections plus optional per-mode sections.

use std::fs;
use std::path::{Path, PathBuf};

use predfront_core::{LogisticBvp, ModelParams, NumericsConfig, Profile, SampledProfile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Bisect,
    Sweep,
    Steady,
    Limits,
}

/// An initial profile: a named family, inline samples or a CSV file with
/// columns `x,value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Cosine { amplitude: f64 },
    Quartic { amplitude: f64 },
    Constant { value: f64 },
    Samples { x: Vec<f64>, values: Vec<f64> },
    File { path: PathBuf },
}

impl ProfileSpec {
    /// Resolves to a core profile; relative file paths are taken from `base`.
    pub fn resolve(&self, base: &Path) -> Result<Profile, CliError> {
        Ok(match self {
            ProfileSpec::Cosine { amplitude } => Profile::Cosine { amplitude: *amplitude },
            ProfileSpec::Quartic { amplitude } => Profile::Quartic { amplitude: *amplitude },
            ProfileSpec::Constant { value } => Profile::Constant { value: *value },
            ProfileSpec::Samples { x, values } => Profile::Samples { x: x.clone(), values: values.clone() },
            ProfileSpec::File { path } => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                Profile::from_samples(read_samples(&full)?)
            }
        })
    }
}

fn read_samples(path: &Path) -> Result<SampledProfile, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let (mut x, mut v) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.deserialize::<(f64, f64)>().enumerate() {
        let (a, b) = rec.map_err(|e| CliError::Config(format!("{} row {}: {e}", path.display(), i + 2)))?;
        x.push(a);
        v.push(b);
    }
    Ok(SampledProfile::new(x, v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub predator: ProfileSpec,
    pub prey: ProfileSpec,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Snapshot cadence; overrides `numerics.snapshot_every` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<f64>,
    #[serde(default = "yes")]
    pub snapshots: bool,
    #[serde(default = "yes")]
    pub plots: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), snapshot_every: None, snapshots: true, plots: true }
    }
}

fn default_delta() -> Option<f64> {
    None
}
fn default_limit_rtol() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Barrier inflation; unset picks `min(0.05, (ϑ/h0 − 1)/2)`.
    #[serde(default = "default_delta", skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Relative tolerance for the long-time limit checks.
    #[serde(default = "default_limit_rtol")]
    pub limit_rtol: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self { delta: None, limit_rtol: default_limit_rtol() }
    }
}

fn default_n_bisect() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisectSpec {
    /// Lower end; defaults to the barrier threshold `mu0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_lo: Option<f64>,
    /// Upper end; defaults to the large-μ bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_hi: Option<f64>,
    #[serde(default = "default_n_bisect")]
    pub n_bisect: u32,
}

impl Default for BisectSpec {
    fn default() -> Self {
        Self { mu_lo: None, mu_hi: None, n_bisect: default_n_bisect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "D")]
    D,
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "h0")]
    H0,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::C => "c",
            Param::D => "D",
            Param::Mu => "mu",
            Param::H0 => "h0",
        }
    }

    pub fn set(self, p: &mut ModelParams, v: f64) {
        match self {
            Param::A => p.a = v,
            Param::B => p.b = v,
            Param::C => p.c = v,
            Param::D => p.d = v,
            Param::Mu => p.mu = v,
            Param::H0 => p.h0 = v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| if i + 1 == n { self.max } else { self.min + (self.max - self.min) * i as f64 / (n - 1) as f64 })
            .collect()
    }
}

fn default_max_cells() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(CliError::Config(format!("sweep needs one or two axes (got {})", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(CliError::Config("sweep axes must be different parameters".into()));
        }
        for ax in &self.axes {
            if ax.count < 2 {
                return Err(CliError::Config(format!("axis {} needs count >= 2", ax.param.name())));
            }
            if !(ax.min > 0.0 && ax.max > ax.min && ax.max.is_finite()) {
                return Err(CliError::Config(format!(
                    "axis {} needs 0 < min < max (got {}, {})",
                    ax.param.name(),
                    ax.min,
                    ax.max
                )));
            }
        }
        let cells: usize = self.axes.iter().map(|a| a.count).product();
        if cells > self.max_cells {
            return Err(CliError::Config(format!("sweep has {cells} cells, above max_cells = {}", self.max_cells)));
        }
        Ok(())
    }
}

fn default_steady_n() -> usize {
    401
}
fn default_steady_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadySpec {
    pub d: f64,
    pub beta: f64,
    pub theta: f64,
    pub l: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "default_steady_n")]
    pub n: usize,
    #[serde(default = "default_steady_tol")]
    pub tol: f64,
}

impl SteadySpec {
    pub fn problem(&self) -> LogisticBvp {
        LogisticBvp { d: self.d, beta: self.beta, theta: self.theta, l: self.l, k: self.k }
    }
}

fn default_rounds() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSpec {
    #[serde(default = "default_rounds")]
    pub rounds: usize,
}

impl Default for LimitsSpec {
    fn default() -> Self {
        Self { rounds: default_rounds() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must match the subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub model: ModelParams,
    pub initial: InitialSpec,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisect: Option<BisectSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitsSpec>,
    /// Directory relative file paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Numerics with the output cadence folded in.
    pub fn effective_numerics(&self) -> NumericsConfig {
        let mut n = self.numerics.clone();
        if let Some(s) = self.outputs.snapshot_every {
            n.snapshot_every = s;
        }
        n
    }

    pub fn predator(&self) -> Result<Profile, CliError> {
        self.initial.predator.resolve(&self.base_dir)
    }

    pub fn prey(&self) -> Result<Profile, CliError> {
        self.initial.prey.resolve(&self.base_dir)
    }

    /// Checks every model-level precondition up front.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate()?;
        self.predator()?.validate_predator(self.model.h0)?;
        self.prey()?.validate_prey()?;
        self.effective_numerics().resolve(&self.model)?;
        if let Some(d) = self.analysis.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CliError::Config(format!("analysis.delta must be positive (got {d})")));
            }
        }
        if !(self.analysis.limit_rtol > 0.0) {
            return Err(CliError::Config("analysis.limit_rtol must be positive".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if let Some(s) = &self.steady {
            s.problem().validate()?;
        }
        Ok(())
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_toml(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the config back out as TOML.
pub fn save_config(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    crate::artifacts::write_atomic(path, cfg.to_toml()?.as_bytes())
}
