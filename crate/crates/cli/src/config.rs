//! Run configuration: a TOML file with nested sections whose defaults
//! reproduce the reference simulation setup, so a bare run needs no config
//! at all. Matrices are given either row-major or through a `diag` shorthand.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use misinfo_core::belief::Covariance;
use misinfo_core::linalg::{Matrix, Vector};
use misinfo_core::policy::PolicyConfig;
use misinfo_core::simulation::{Audience, ScenarioSpec, Spread};

/// A square matrix in config form: `{ diag = [...] }` or a row-major list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Diag { diag: Vec<f64> },
    Full(Vec<f64>),
}

impl MatrixSpec {
    fn to_matrix(&self, dim: usize, field: &str) -> Result<Matrix> {
        match self {
            MatrixSpec::Diag { diag } => {
                if diag.len() != dim {
                    bail!("{field}: diag has {} entries, expected {dim}", diag.len());
                }
                Ok(Matrix::diag(diag))
            }
            MatrixSpec::Full(rows) => Matrix::from_rows(dim, rows.clone())
                .map_err(|e| anyhow!("{field}: {e}")),
        }
    }
}

fn diag_spec(entries: &[f64]) -> MatrixSpec {
    MatrixSpec::Diag {
        diag: entries.to_vec(),
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AudienceSpec {
    Indifferent,
    Uneducated,
    Educated,
}

impl From<AudienceSpec> for Audience {
    fn from(a: AudienceSpec) -> Audience {
        match a {
            AudienceSpec::Indifferent => Audience::Indifferent,
            AudienceSpec::Uneducated => Audience::Uneducated,
            AudienceSpec::Educated => Audience::Educated,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub dim: usize,
    pub sigma: MatrixSpec,
    pub sigma_s: MatrixSpec,
    pub mu_spread: MatrixSpec,
    /// Mean audience belief used by `design-report` (sweeps sample it).
    pub mu_bar: Vec<f64>,
    pub n_viewers: usize,
    pub audience: AudienceSpec,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            dim: 2,
            sigma: diag_spec(&[1.0, 1.0]),
            sigma_s: diag_spec(&[0.5, 0.5]),
            mu_spread: diag_spec(&[0.1, 0.1]),
            mu_bar: vec![0.0, 0.0],
            n_viewers: 500,
            audience: AudienceSpec::Indifferent,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub epsilon: f64,
    pub beta: f64,
    pub d_min: f64,
    pub delta: f64,
    pub alpha: f64,
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            beta: 1.6,
            d_min: 1.1,
            delta: 0.0,
            alpha: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            start: 0.1,
            stop: 3.0,
            step: 0.1,
        }
    }
}

/// The raw config file; every field has a documented default.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    /// RNG seed. Fixed default, never wall clock, so bare runs reproduce.
    pub seed: u64,
    /// Monte Carlo draws per sweep grid point / policy evaluation.
    pub n_draws: usize,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    pub scenario: ScenarioSection,
    pub policy: PolicySection,
    pub epsilon_grid: GridSection,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_draws: 2000,
            output_dir: PathBuf::from("out"),
            emit_svg: false,
            scenario: ScenarioSection::default(),
            policy: PolicySection::default(),
            epsilon_grid: GridSection::default(),
        }
    }
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Fully resolved run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub policy: PolicyConfig,
    pub mu_bar: Vector,
    pub epsilon_grid: Vec<f64>,
    pub n_draws: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self> {
        let dim = raw.scenario.dim;
        let sigma = Covariance::new(raw.scenario.sigma.to_matrix(dim, "scenario.sigma")?)
            .map_err(|e| anyhow!("scenario.sigma: {e}"))?;
        let sigma_s = Covariance::new(raw.scenario.sigma_s.to_matrix(dim, "scenario.sigma_s")?)
            .map_err(|e| anyhow!("scenario.sigma_s: {e}"))?;
        let mu_spread = Spread::new(raw.scenario.mu_spread.to_matrix(dim, "scenario.mu_spread")?)
            .map_err(|e| anyhow!("scenario.mu_spread: {e}"))?;
        if raw.scenario.mu_bar.len() != dim {
            bail!(
                "scenario.mu_bar has {} entries, expected {dim}",
                raw.scenario.mu_bar.len()
            );
        }
        let mu_bar = Vector::from_slice(&raw.scenario.mu_bar);
        if !mu_bar.is_finite() {
            bail!("scenario.mu_bar must be finite");
        }

        let policy = PolicyConfig {
            epsilon: raw.policy.epsilon,
            beta: raw.policy.beta,
            d_min: raw.policy.d_min,
            delta: raw.policy.delta,
            alpha: raw.policy.alpha,
        };
        policy.validate().map_err(|e| anyhow!("policy: {e}"))?;

        // The falsehood margin is a single config value: policy sampling and
        // the scenario hook both read it.
        let scenario = ScenarioSpec {
            dim,
            sigma,
            sigma_s,
            mu_spread,
            n_viewers: raw.scenario.n_viewers,
            audience: raw.scenario.audience.into(),
            d_min: raw.policy.d_min,
        };
        scenario.validate().map_err(|e| anyhow!("scenario: {e}"))?;

        let epsilon_grid = expand_grid(&raw.epsilon_grid)?;
        if raw.n_draws == 0 {
            bail!("n_draws must be at least 1");
        }

        Ok(Self {
            scenario,
            policy,
            mu_bar,
            epsilon_grid,
            n_draws: raw.n_draws,
            seed: raw.seed,
            output_dir: raw.output_dir.clone(),
            emit_svg: raw.emit_svg,
        })
    }
}

fn expand_grid(grid: &GridSection) -> Result<Vec<f64>> {
    if !grid.step.is_finite() || grid.step <= 0.0 {
        bail!("epsilon_grid.step must be positive, got {}", grid.step);
    }
    if grid.start.is_nan() || grid.stop.is_nan() || grid.start >= grid.stop {
        bail!(
            "epsilon_grid.start ({}) must be below stop ({})",
            grid.start,
            grid.stop
        );
    }
    if grid.start <= 0.0 {
        bail!("epsilon_grid.start must be positive, got {}", grid.start);
    }
    let count = ((grid.stop - grid.start) / grid.step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| grid.start + k as f64 * grid.step).collect())
}

/// Parses a comma-separated vector argument like `1.0,0.5`.
pub fn parse_vector(text: &str, field: &str) -> Result<Vector> {
    let entries = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("{field}: `{p}` is not a number"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if entries.is_empty() {
        bail!("{field}: empty vector");
    }
    let v = Vector::from_vec(entries);
    if !v.is_finite() {
        bail!("{field}: entries must be finite");
    }
    Ok(v)
}
