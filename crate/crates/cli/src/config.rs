//! Run configuration: a TOML file plus command-line overrides.
//!
//! Flags win over file values. Every run writes the resolved
//! configuration into its run record, so a run can be replayed
//! bit-identically from the record alone.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use carousel_core::data::SourceFormat;
use carousel_core::models::HyperParams;
use carousel_core::tuning::SearchSpace;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub tuning: TuningConfig,
    #[serde(default, rename = "model")]
    pub models: Vec<ModelSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataConfig {
    /// Ratings file: `ratings.dat` (double-colon) or `u.data` (tab).
    pub ratings: PathBuf,
    /// "double-colon" or "tab".
    #[serde(default = "default_format")]
    pub format: String,
    /// Optional `movies.dat` for genre/year features.
    #[serde(default)]
    pub movies: Option<PathBuf>,
    /// Optional `tags.dat` for tag features.
    #[serde(default)]
    pub tags: Option<PathBuf>,
}

fn default_format() -> String {
    "double-colon".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitConfig {
    #[serde(default = "default_ratios")]
    pub ratios: [f64; 3],
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { ratios: default_ratios(), seed: default_seed() }
    }
}

fn default_ratios() -> [f64; 3] {
    [0.8, 0.1, 0.1]
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_weight")]
    pub w_row: f64,
    #[serde(default = "default_weight")]
    pub w_col: f64,
    /// Labels of the models forming the fixed top of the page.
    #[serde(default = "default_fixed")]
    pub fixed: Vec<String>,
    #[serde(default = "default_true")]
    pub exclude_seen: bool,
    /// Minimum test rating counted as relevant (absent = any).
    #[serde(default)]
    pub relevance_threshold: Option<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: default_k(),
            w_row: default_weight(),
            w_col: default_weight(),
            fixed: default_fixed(),
            exclude_seen: true,
            relevance_threshold: None,
        }
    }
}

fn default_k() -> usize {
    10
}

fn default_weight() -> f64 {
    1.0
}

fn default_fixed() -> Vec<String> {
    vec!["top-popular".into()]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuningConfig {
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Search-space overrides; defaults are declared in the library.
    #[serde(default)]
    pub space: Option<SearchSpace>,
}

impl Default for TuningConfig {
    fn default() -> Self {
        Self { budget: default_budget(), seed: default_seed(), space: None }
    }
}

fn default_budget() -> usize {
    50
}

/// One model entry: either inline hyperparameters (tagged by `family`)
/// or a pointer to a tuned-parameters file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    File {
        #[serde(default)]
        label: Option<String>,
        params_file: PathBuf,
    },
    Inline {
        #[serde(default)]
        label: Option<String>,
        #[serde(flatten)]
        params: HyperParams,
    },
}

impl ModelSpec {
    /// Resolve to (label, params), reading the params file if needed.
    pub fn resolve(&self, base: &Path) -> Result<(String, HyperParams)> {
        match self {
            ModelSpec::Inline { label, params } => {
                let label =
                    label.clone().unwrap_or_else(|| params.family().name().to_string());
                Ok((label, *params))
            }
            ModelSpec::File { label, params_file } => {
                let path = if params_file.is_relative() {
                    base.join(params_file)
                } else {
                    params_file.clone()
                };
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading params file {}", path.display()))?;
                let params: HyperParams = toml::from_str(&text)
                    .with_context(|| format!("parsing params file {}", path.display()))?;
                let label =
                    label.clone().unwrap_or_else(|| params.family().name().to_string());
                Ok((label, params))
            }
        }
    }
}

impl RunConfig {
    /// Load a config file and validate it before any work happens.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((config, base))
    }

    pub fn validate(&self, base: &Path) -> Result<()> {
        let ratings = self.resolve_path(base, &self.data.ratings);
        if !ratings.exists() {
            bail!("ratings file {} does not exist", ratings.display());
        }
        for optional in [&self.data.movies, &self.data.tags].into_iter().flatten() {
            let path = self.resolve_path(base, optional);
            if !path.exists() {
                bail!("data file {} does not exist", path.display());
            }
        }
        self.source_format()?;
        let [a, b, c] = self.split.ratios;
        if !(a >= 0.0 && b >= 0.0 && c >= 0.0) || (a + b + c - 1.0).abs() > 1e-9 {
            bail!("split ratios must be nonnegative and sum to 1, got {:?}", self.split.ratios);
        }
        if self.eval.k == 0 {
            bail!("eval.k must be at least 1");
        }
        if self.eval.w_row == 0.0 && self.eval.w_col == 0.0 {
            bail!("discount weights must not both be zero");
        }
        let mut labels = std::collections::HashSet::new();
        for spec in &self.models {
            let (label, params) = spec.resolve(base)?;
            params.validate()?;
            if !labels.insert(label.clone()) {
                bail!(
                    "duplicate model label '{label}'; give one entry an explicit `label`"
                );
            }
        }
        Ok(())
    }

    pub fn resolve_path(&self, base: &Path, p: &Path) -> PathBuf {
        if p.is_relative() {
            base.join(p)
        } else {
            p.to_path_buf()
        }
    }

    pub fn source_format(&self) -> Result<SourceFormat> {
        match self.data.format.as_str() {
            "double-colon" => Ok(SourceFormat::DoubleColon),
            "tab" => Ok(SourceFormat::TabSeparated),
            other => bail!("unknown data format '{other}' (expected 'double-colon' or 'tab')"),
        }
    }
}
