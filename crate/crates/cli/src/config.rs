//! Campaign configuration: one JSON document with `scenario`, `requirement`,
//! `search`, `method` and optional `heatmap` / `assignment` sections.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use stlf_core::optimizer::{SaConfig, SearchSpace};
use stlf_core::requirements::{build_by_name, RequirementParams};
use stlf_core::scenario::{Assignment, ScenarioConfig};
use stlf_core::stl::{parse, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Method {
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "sa")]
    Sa,
    #[serde(rename = "ca+sa")]
    CaSa,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementConfig {
    /// Inline STL text.
    pub formula: Option<String>,
    /// `R1` .. `R5`.
    pub name: Option<String>,
    pub params: Option<RequirementParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub space: SearchSpace,
    #[serde(default)]
    pub budget: usize,
    #[serde(default)]
    pub sa: SaConfig,
    /// Annealing budget per covering-array row in `ca+sa`.
    #[serde(default = "default_per_seed_budget")]
    pub per_seed_budget: usize,
    /// Covering array for `ca+sa`, relative to the config file.
    pub ca_file: Option<PathBuf>,
}

fn default_per_seed_budget() -> usize {
    30
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapConfig {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub requirement: Option<RequirementConfig>,
    pub search: Option<SearchConfig>,
    pub method: Option<Method>,
    pub heatmap: Option<HeatmapConfig>,
    pub assignment: Option<Assignment>,
    #[serde(skip)]
    pub dir: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Config = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        cfg.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn search(&self) -> Result<&SearchConfig> {
        self.search
            .as_ref()
            .context("config has no `search` section")
    }

    pub fn requirement(&self) -> Result<Formula> {
        let req = self
            .requirement
            .as_ref()
            .context("config has no `requirement` section")?;
        match (&req.formula, &req.name) {
            (Some(text), None) => parse(text).with_context(|| format!("requirement `{text}`")),
            (None, Some(name)) => {
                let mut p = req.params.clone().unwrap_or_default();
                if p.object_ids.is_empty() {
                    if let ScenarioConfig::Perception(s) = &self.scenario {
                        p.object_ids = s.init.objects.iter().map(|o| o.id.clone()).collect();
                    }
                }
                Ok(build_by_name(name, &p)?)
            }
            _ => bail!("requirement needs exactly one of `formula` or `name`"),
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }
}
