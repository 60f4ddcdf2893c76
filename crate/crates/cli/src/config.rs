//! Run configuration: JSON in millimetres and amperes.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use motfield::analysis::SuitabilityTargets;
use motfield::units::millimetres;
use motfield::{GeometrySpec, Material, ObjectiveSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Half-width of the gradient fit.
    #[serde(rename = "window_mm", with = "millimetres")]
    pub window: f64,
    pub samples: usize,
    #[serde(rename = "zero_search_radius_mm", with = "millimetres")]
    pub zero_search_radius: f64,
    #[serde(rename = "line_half_range_mm", with = "millimetres")]
    pub line_half_range: f64,
    pub line_samples: usize,
    #[serde(rename = "plane_half_range_mm", with = "millimetres")]
    pub plane_half_range: f64,
    pub plane_samples: usize,
    /// Any of `xy`, `xz`, `yz`.
    pub planes: Vec<String>,
    #[serde(rename = "beam_diameter_mm", with = "millimetres")]
    pub beam_diameter: f64,
    pub suitability: SuitabilityTargets,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window: 2e-3,
            samples: 41,
            zero_search_radius: 2e-3,
            line_half_range: 5e-3,
            line_samples: 101,
            plane_half_range: 5e-3,
            plane_samples: 21,
            planes: vec!["xy".into(), "xz".into(), "yz".into()],
            beam_diameter: 15e-3,
            suitability: SuitabilityTargets::default(),
        }
    }
}

pub const PLANES: [(&str, usize, usize); 3] = [("xy", 0, 1), ("xz", 0, 2), ("yz", 1, 2)];

impl AnalysisConfig {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("window_mm", self.window),
            ("zero_search_radius_mm", self.zero_search_radius),
            ("beam_diameter_mm", self.beam_diameter),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("analysis.{name} must be positive");
            }
        }
        if !(self.line_half_range >= 0.0) || !(self.plane_half_range >= 0.0) {
            bail!("analysis half ranges must be non-negative");
        }
        if self.samples < 5 {
            bail!("analysis.samples must be at least 5");
        }
        if self.line_samples == 0 || self.plane_samples == 0 {
            bail!("analysis line and plane sample counts must be at least 1");
        }
        for p in &self.planes {
            if !PLANES.iter().any(|(name, _, _)| name == p) {
                bail!("analysis.planes: unknown plane '{p}' (expected xy, xz or yz)");
            }
        }
        Ok(())
    }
}

/// Material by preset name or explicit resistivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialConfig {
    Named(String),
    Custom(Material),
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig::Named("copper".into())
    }
}

impl MaterialConfig {
    pub fn resolve(&self) -> Result<Material> {
        match self {
            MaterialConfig::Named(n) => {
                Material::by_name(n).with_context(|| format!("unknown material '{n}' (expected copper or titanium)"))
            }
            MaterialConfig::Custom(m) => {
                m.validate()?;
                Ok(m.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub contact_area_mm2: f64,
    pub delta_t_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveSpec>,
    /// Objective evaluations allowed to `optimize`.
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Output directory, overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_budget() -> usize {
    200
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.analysis.validate()?;
        self.material.resolve()?;
        if let Some(t) = &self.thermal {
            if !(t.contact_area_mm2 > 0.0) || !(t.delta_t_k > 0.0) {
                bail!("thermal.contact_area_mm2 and thermal.delta_t_k must be positive");
            }
        }
        if let Some(o) = &self.objective {
            o.validate().context("invalid objective")?;
        }
        Ok(())
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> Result<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.clone())
            .context("no output directory: pass --out or set \"output\" in the config")
    }
}
