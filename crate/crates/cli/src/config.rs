//! JSON run configuration.

use std::path::{Path, PathBuf};

use anyhow::Result;
use igame_core::scenarios::ScenarioOverrides;
use igame_core::verbalization::VerbalizationConfig;
use serde::{Deserialize, Serialize};

use crate::error::invalid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Simulate,
    Estimate,
    Predict,
    Dialogue,
    Verbalize,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Simulate => "simulate",
            CommandName::Estimate => "estimate",
            CommandName::Predict => "predict",
            CommandName::Dialogue => "dialogue",
            CommandName::Verbalize => "verbalize",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Trajectory CSV to analyse instead of simulating the scenario.
    pub input: Option<PathBuf>,
    pub anchors: Option<Vec<f64>>,
    pub horizon: Option<f64>,
    pub min_epoch_len: Option<f64>,
    pub changepoint_penalty: Option<f64>,
    pub score_threshold: Option<f64>,
    pub symbol_bins: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub scenario: Option<String>,
    #[serde(default)]
    pub overrides: ScenarioOverrides,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("invalid config {}: {e}", path.display())))?;
        // Relative input paths are taken relative to the config file.
        if let (Some(input), Some(dir)) = (&cfg.analysis.input, path.parent()) {
            if input.is_relative() {
                cfg.analysis.input = Some(dir.join(input));
            }
        }
        Ok(cfg)
    }

    /// Scenario overrides with the grid section applied on top.
    pub fn scenario_overrides(&self) -> Result<ScenarioOverrides> {
        let mut ov = self.overrides.clone();
        if let Some(grid) = &self.grid {
            for (name, from_grid, from_overrides) in [
                ("t_end", grid.t_end, &mut ov.t_end),
                ("dt", grid.dt, &mut ov.dt),
            ] {
                if let Some(v) = from_grid {
                    if from_overrides.is_some_and(|o| o != v) {
                        return Err(invalid(format!(
                            "grid.{name} conflicts with overrides.{name}"
                        )));
                    }
                    *from_overrides = Some(v);
                }
            }
        }
        Ok(ov)
    }

    pub fn verbalization_config(&self) -> Result<VerbalizationConfig> {
        let a = &self.analysis;
        let d = VerbalizationConfig::default();
        let cfg = VerbalizationConfig {
            min_epoch_len: a.min_epoch_len.unwrap_or(d.min_epoch_len),
            changepoint_penalty: a.changepoint_penalty.unwrap_or(d.changepoint_penalty),
            feature_spec: d.feature_spec,
            score_threshold: a.score_threshold.unwrap_or(d.score_threshold),
            symbol_bins: a.symbol_bins.unwrap_or(d.symbol_bins),
        };
        cfg.validate()
            .map_err(|e| invalid(format!("analysis: {e}")))?;
        Ok(cfg)
    }
}
