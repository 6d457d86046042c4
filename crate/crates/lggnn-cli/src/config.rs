//! Experiment configuration and the graphon spec-file schema (both plain
//! JSON documents).

use crate::{CliError, Result};
use lggnn_core::graphon::GraphonModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Graphon spec document: a flat JSON object selected by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphonSpec {
    Constant { p: f64 },
    Ssbm { communities: usize, intra: f64, inter: f64 },
    Sbm {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Geometric { dim: usize, threshold: f64 },
    Piecewise { grid: Vec<Vec<f64>> },
}

impl GraphonSpec {
    pub fn build(&self) -> Result<GraphonModel> {
        let model = match self {
            GraphonSpec::Constant { p } => GraphonModel::constant(*p),
            GraphonSpec::Ssbm { communities, intra, inter } => {
                GraphonModel::ssbm(*communities, *intra, *inter)
            }
            GraphonSpec::Sbm { matrix, weights } => match weights {
                Some(w) => GraphonModel::sbm(matrix.clone(), w.clone()),
                None => GraphonModel::sbm_equal(matrix.clone()),
            },
            GraphonSpec::Geometric { dim, threshold } => {
                GraphonModel::geometric(*dim, *threshold)
            }
            GraphonSpec::Piecewise { grid } => GraphonModel::piecewise(grid.clone()),
        };
        model.map_err(|e| CliError::config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read graphon spec {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("bad graphon spec {}: {e}", path.display())))
    }
}

/// Where the model comes from: a named preset or a spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelRef {
    Preset(String),
    SpecFile(String),
    Inline(GraphonSpec),
}

impl ModelRef {
    pub fn resolve(&self) -> Result<(GraphonModel, String)> {
        match self {
            ModelRef::Preset(name) => {
                let spec = crate::presets::preset(name)
                    .ok_or_else(|| CliError::config(format!("unknown preset `{name}`")))?;
                Ok((spec.build()?, name.clone()))
            }
            ModelRef::SpecFile(path) => {
                let spec = GraphonSpec::from_file(Path::new(path))?;
                Ok((spec.build()?, path.clone()))
            }
            ModelRef::Inline(spec) => Ok((spec.build()?, "inline".to_string())),
        }
    }
}

/// Sparsity schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    One,
    InvSqrtN,
    LogNOverN,
}

impl RhoMode {
    pub fn resolve(&self, n: usize) -> f64 {
        match self {
            RhoMode::One => 1.0,
            RhoMode::InvSqrtN => 1.0 / (n as f64).sqrt(),
            RhoMode::LogNOverN => (n as f64).ln() / n as f64,
        }
    }
}

/// Embedding-dimension policy. `Default` follows `max(64, ceil(4 / rho))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimPolicy {
    Default,
    MatchN,
    Fixed(usize),
}

impl DimPolicy {
    pub fn resolve(&self, n: usize, rho: f64) -> usize {
        match self {
            DimPolicy::Default => 64usize.max((4.0 / rho).ceil() as usize),
            DimPolicy::MatchN => n,
            DimPolicy::Fixed(d) => *d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    LggnnBox,
    LggnnPls,
    GcnUntrained,
}

impl MethodKind {
    pub fn label(&self) -> &'static str {
        match self {
            MethodKind::LggnnBox => "lggnn_box",
            MethodKind::LggnnPls => "lggnn_pls",
            MethodKind::GcnUntrained => "gcn_untrained",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitProtocol {
    InSample,
    OutSample,
}

/// Search-space policy for the box fit.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsPolicy {
    /// `b_i = 2` for every coefficient.
    #[default]
    Default,
    /// Explicit `b_i` values (scaled by `1/rho^i` internally).
    Box(Vec<f64>),
    /// l1 ball of the given radius.
    L1Radius(f64),
    /// l1 ball with radius `(mu_1 rho)^-1` from the model spectrum.
    L1FromSpectrum,
    /// Box sized to cover `beta*` with 20% margin (block models with
    /// m_W <= L+1; falls back to `Default` otherwise).
    FromSpectrum,
}

fn default_p() -> f64 {
    0.2
}

fn default_ks() -> Vec<usize> {
    vec![100, 500]
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    20_000
}

/// One experiment: a model, a size, a sparsity schedule, a method, a split
/// protocol, and the seeds to sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelRef,
    pub n: usize,
    pub rho_mode: RhoMode,
    pub layers: usize,
    #[serde(default = "DimPolicy::default_policy")]
    pub d_policy: DimPolicy,
    pub method: MethodKind,
    pub split: SplitProtocol,
    #[serde(default = "default_p")]
    pub holdout_p: f64,
    #[serde(default = "default_ks")]
    pub metric_ks: Vec<usize>,
    pub seeds: Vec<u64>,
    pub output_dir: String,
    #[serde(default)]
    pub bounds: BoundsPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pls_components: Option<usize>,
    #[serde(default = "default_tol")]
    pub solver_tol: f64,
    #[serde(default = "default_max_iter")]
    pub solver_max_iter: usize,
    /// Write per-seed prediction score files (for histogram plot data).
    #[serde(default)]
    pub store_scores: bool,
}

impl DimPolicy {
    fn default_policy() -> Self {
        DimPolicy::Default
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(CliError::config("seeds must be nonempty"));
        }
        if self.n < 2 {
            return Err(CliError::config("n must be >= 2"));
        }
        let rho = self.rho_mode.resolve(self.n);
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(CliError::config(format!("rho_mode resolves to {rho}, outside (0, 1]")));
        }
        if !(self.holdout_p > 0.0 && self.holdout_p < 1.0) {
            return Err(CliError::config("holdout_p must lie in (0, 1)"));
        }
        if let Some(c) = self.pls_components {
            if c == 0 || c > self.layers + 1 {
                return Err(CliError::config("pls_components must lie in 1..=layers+1"));
            }
        }
        Ok(())
    }
}
