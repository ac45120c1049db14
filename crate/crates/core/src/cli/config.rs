//! Run configuration: a TOML document with `model`, `data`, `summary`,
//! `distance`, `smc`, `bounds` and `experiment` tables. The bundled presets in
//! `presets/*.toml` double as schema examples.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundConstants, Concentration};
use crate::error::{Error, Result};
use crate::models::{simulate_dataset, DiscreteToyModel, GaussianLocationModel, GenerativeModel, MixtureModel, TruthGenerator};
use crate::rng::{stream, Purpose};
use crate::smc::SmcConfig;
use crate::statistics::{DistanceSpec, SummarySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Mixture(MixtureModel),
    GaussianLocation(GaussianLocationModel),
    DiscreteToy(DiscreteToyModel),
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Mixture(m) => m.validate(),
            ModelConfig::DiscreteToy(m) => m.validate(),
            ModelConfig::GaussianLocation(m) => {
                if m.prior_var > 0.0 && m.noise_sd > 0.0 && m.prior_var.is_finite() && m.noise_sd.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig("gaussian_location needs positive prior_var and noise_sd".into()))
                }
            }
        }
    }

    pub fn build(&self) -> Box<dyn GenerativeModel> {
        match self {
            ModelConfig::Mixture(m) => Box::new(m.clone()),
            ModelConfig::GaussianLocation(m) => Box::new(m.clone()),
            ModelConfig::DiscreteToy(m) => Box::new(m.clone()),
        }
    }

    pub fn param_dim(&self) -> usize {
        self.build().param_dim()
    }

    /// Prior variance used by the bound calculators (largest coordinate).
    pub fn prior_var(&self) -> f64 {
        match self {
            ModelConfig::Mixture(m) => m.prior.variances.iter().copied().fold(0.0, f64::max),
            ModelConfig::GaussianLocation(m) => m.prior_var,
            ModelConfig::DiscreteToy(_) => 1.0,
        }
    }
}

/// Where the observed dataset comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataConfig {
    /// Drawn from a Gaussian-mixture truth.
    Truth { truth: TruthGenerator },
    /// Drawn from the model itself at a fixed parameter.
    Model { theta: Vec<f64>, n: usize },
    /// Given literally.
    Values { values: Vec<f64> },
}

impl DataConfig {
    pub fn n(&self) -> usize {
        match self {
            DataConfig::Truth { truth } => truth.n,
            DataConfig::Model { n, .. } => *n,
            DataConfig::Values { values } => values.len(),
        }
    }

    pub fn set_n(&mut self, n: usize) -> Result<()> {
        match self {
            DataConfig::Truth { truth } => truth.n = n,
            DataConfig::Model { n: m, .. } => *m = n,
            DataConfig::Values { .. } => {
                return Err(Error::InvalidConfig("cannot resize a literal dataset".into()));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DataConfig::Truth { truth } => truth.validate(),
            DataConfig::Model { theta, n } => {
                if *n == 0 || theta.iter().any(|t| !t.is_finite()) {
                    Err(Error::InvalidConfig("data.model needs n >= 1 and a finite theta".into()))
                } else {
                    Ok(())
                }
            }
            DataConfig::Values { values } => {
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    Err(Error::InvalidConfig("data.values must be a non-empty list of finite numbers".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The observed dataset for a master seed.
    pub fn observations(&self, model: &dyn GenerativeModel, seed: u64) -> Result<Vec<f64>> {
        let mut rng = stream(seed, Purpose::Observations, 0, 0);
        match self {
            DataConfig::Truth { truth } => truth.generate(&mut rng),
            DataConfig::Model { theta, n } => simulate_dataset(model, theta, *n, &mut rng),
            DataConfig::Values { values } => Ok(values.clone()),
        }
    }
}

fn default_epsilon() -> f64 {
    0.05
}
fn default_one() -> f64 {
    1.0
}
fn default_grid() -> usize {
    64
}

/// User-facing bound inputs; the rest of [`BoundConstants`] is derived from
/// the model, data and statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSettings {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_one")]
    pub alpha: f64,
    #[serde(default = "default_one")]
    pub lipschitz: f64,
    #[serde(default = "default_one")]
    pub c: f64,
    /// Statistic bound; defaults to the summary's certified feature bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default = "default_grid")]
    pub beta_grid_size: usize,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self { epsilon: default_epsilon(), alpha: 1.0, lipschitz: 1.0, c: 1.0, k: None, beta_grid_size: default_grid() }
    }
}

fn default_reference_factor() -> usize {
    10
}
fn default_n_grid() -> Vec<usize> {
    vec![30, 90, 270]
}
fn default_bins() -> usize {
    101
}
fn default_range() -> [f64; 2] {
    [-5.0, 5.0]
}
fn default_uniform_cap() -> f64 {
    1e6
}

/// Knobs used only by the `experiment` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Particle multiplier of the reference run.
    #[serde(default = "default_reference_factor")]
    pub reference_factor: usize,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default = "default_range")]
    pub histogram_range: [f64; 2],
    /// Ladder cap of the uniform-kernel baseline (it stops on the budget).
    #[serde(default = "default_uniform_cap")]
    pub uniform_lambda_max: f64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            reference_factor: default_reference_factor(),
            n_grid: default_n_grid(),
            histogram_bins: default_bins(),
            histogram_range: default_range(),
            uniform_lambda_max: default_uniform_cap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    pub data: DataConfig,
    pub summary: SummarySpec,
    pub distance: DistanceSpec,
    pub smc: SmcConfig,
    #[serde(default)]
    pub bounds: BoundSettings,
    #[serde(default)]
    pub experiment: ExperimentSettings,
}

/// A configuration error with the source line it points at, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.origin, l, self.message),
            None => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ConfigError> for Error {
    fn from(e: ConfigError) -> Self {
        Error::InvalidConfig(e.to_string())
    }
}

pub const PRESETS: [(&str, &str); 5] = [
    ("exp1", include_str!("../../presets/exp1.toml")),
    ("exp2", include_str!("../../presets/exp2.toml")),
    ("exp3", include_str!("../../presets/exp3.toml")),
    ("toy-discrete", include_str!("../../presets/toy-discrete.toml")),
    ("toy-quadrature", include_str!("../../presets/toy-quadrature.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// 1-based line of `dotted` (e.g. `smc.n_particles`) in a TOML document.
pub fn locate_key(text: &str, dotted: &str) -> Option<usize> {
    let parts: Vec<&str> = dotted.split('.').collect();
    let (key, tables) = parts.split_last()?;
    let mut current: Vec<String> = Vec::new();
    let mut table_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            let inner = line.trim_start_matches('[').trim_end_matches(']');
            current = inner.split('.').map(|s| s.trim().to_string()).collect();
            if current.iter().map(String::as_str).eq(tables.iter().copied()) {
                table_line = Some(i + 1);
            }
            continue;
        }
        let in_table = current.iter().map(String::as_str).eq(tables.iter().copied());
        if in_table {
            if let Some((lhs, _)) = line.split_once('=') {
                if lhs.trim() == *key {
                    return Some(i + 1);
                }
            }
        }
        // inline form, e.g. `m_policy = { ... }` written under the parent table
        if !tables.is_empty() && current.iter().map(String::as_str).eq(tables[..tables.len() - 1].iter().copied()) {
            if let Some((lhs, _)) = line.split_once('=') {
                if lhs.trim() == tables[tables.len() - 1] {
                    return Some(i + 1);
                }
            }
        }
    }
    table_line
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Sets `dotted = raw` in a TOML table, creating intermediate tables.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> std::result::Result<(), String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override `{assignment}` is not of the form key=value"))?;
    let parts: Vec<&str> = path.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("override key `{path}` has an empty segment"));
    }
    let (last, parents) = parts.split_last().expect("non-empty");
    let mut table = doc;
    for p in parents {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| format!("override key `{path}`: `{p}` is not a table"))?;
    }
    table.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    /// Parses and validates a TOML document with overrides applied.
    pub fn parse(text: &str, origin: &str, overrides: &[String]) -> std::result::Result<Self, ConfigError> {
        let err = |line, message: String| ConfigError { origin: origin.to_string(), line, message };
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1));
            err(line, e.message().to_string())
        })?;
        for o in overrides {
            apply_override(&mut doc, o).map_err(|m| err(None, m))?;
        }
        let cfg: RunConfig = toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| {
            let msg = e.message().to_string();
            let line = msg
                .split('`')
                .nth(1)
                .and_then(|k| text.lines().position(|l| l.trim_start().starts_with(k)).map(|i| i + 1));
            err(line, msg)
        })?;
        cfg.validate().map_err(|(key, e)| {
            let message = match e {
                Error::InvalidConfig(m) | Error::InvalidParameter(m) | Error::InvalidInput(m) => m,
                other => other.to_string(),
            };
            err(locate_key(text, key), format!("{key}: {message}"))
        })?;
        Ok(cfg)
    }

    pub fn from_preset(name: &str, overrides: &[String]) -> std::result::Result<Self, ConfigError> {
        let text = preset_text(name).ok_or_else(|| ConfigError {
            origin: "--preset".into(),
            line: None,
            message: format!(
                "unknown preset `{name}`; known presets: {}",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            ),
        })?;
        Self::parse(text, &format!("preset {name}"), overrides)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            origin: path.display().to_string(),
            line: None,
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string(), overrides)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Validates every section; the error names the offending key.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, Error)> {
        self.model.validate().map_err(|e| ("model", e))?;
        self.data.validate().map_err(|e| ("data", e))?;
        self.summary.validate().map_err(|e| ("summary", e))?;
        self.distance.validate().map_err(|e| ("distance", e))?;
        self.smc.validate().map_err(|e| {
            let key = match &e {
                Error::InvalidConfig(m) if m.starts_with("n_particles") => "smc.n_particles",
                Error::InvalidConfig(m) if m.starts_with("tau") => "smc.tau",
                Error::InvalidConfig(m) if m.starts_with("lambda_target") => "smc.lambda_target",
                Error::InvalidConfig(m) if m.contains("lambda_max") => "smc.lambda_max",
                Error::InvalidConfig(m) if m.contains("target_accept") || m.contains("m_max") => "smc.m_policy",
                _ => "smc",
            };
            (key, e)
        })?;
        if let DataConfig::Model { theta, .. } = &self.data {
            if theta.len() != self.model.param_dim() {
                return Err((
                    "data.theta",
                    Error::InvalidConfig(format!("expected {} parameters, got {}", self.model.param_dim(), theta.len())),
                ));
            }
        }
        let b = &self.bounds;
        if !(b.epsilon > 0.0 && b.epsilon < 1.0) {
            return Err(("bounds.epsilon", Error::InvalidConfig(format!("epsilon must lie in (0,1), got {}", b.epsilon))));
        }
        for (key, v) in [("bounds.alpha", b.alpha), ("bounds.lipschitz", b.lipschitz), ("bounds.c", b.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err((key, Error::InvalidConfig(format!("must be positive and finite, got {v}"))));
            }
        }
        if b.k.is_some_and(|k| !(k > 0.0 && k.is_finite())) {
            return Err(("bounds.k", Error::InvalidConfig("must be positive and finite".into())));
        }
        let e = &self.experiment;
        if e.reference_factor == 0 || e.histogram_bins == 0 || e.n_grid.contains(&0) {
            return Err(("experiment", Error::InvalidConfig("counts must be positive".into())));
        }
        if !(e.histogram_range[0] < e.histogram_range[1]) {
            return Err(("experiment.histogram_range", Error::InvalidConfig("range must be increasing".into())));
        }
        Ok(())
    }

    /// Bound constants for this configuration; `InvalidConfig` when the
    /// statistic is unbounded and no `bounds.k` is given.
    pub fn bound_constants(&self) -> Result<BoundConstants> {
        let n = self.data.n();
        let k = match self.bounds.k.or_else(|| self.summary.feature_bound()) {
            Some(k) => k,
            None => {
                return Err(Error::InvalidConfig(
                    "the statistic is unbounded; set bounds.k or clamp the observations".into(),
                ))
            }
        };
        let concentration = match self.distance {
            DistanceSpec::ScaledEmpiricalL2 => Concentration::ScaledL2,
            _ => Concentration::Lp,
        };
        let c = BoundConstants {
            n: n as f64,
            m: self.summary.dim(n) as f64,
            p: self.distance.norm_order(),
            k,
            d: self.model.param_dim() as f64,
            prior_var: self.model.prior_var(),
            lipschitz: self.bounds.lipschitz,
            c: self.bounds.c,
            epsilon: self.bounds.epsilon,
            alpha: self.bounds.alpha,
            concentration,
        };
        c.validate()?;
        Ok(c)
    }
}
