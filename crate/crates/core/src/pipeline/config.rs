use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{PipelineError, Result};
use crate::complete_intersections::{family_catalog, parse_system, CatalogEntry, Family};
use crate::linalg_paths::DEFAULT_GRID;
use crate::spin_lift::DEFAULT_LOOP_GRID;

/// Where the polynomial system comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySource {
    /// A system file in the text grammar.
    File { polynomial_file: PathBuf, factor_dims: Vec<usize> },
    /// A catalog member, e.g. `{"name": "Xd", "d": 4, "n": 3}`.
    Catalog(Family),
}

/// Overrides of module tolerances. All must be positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Chart σ_min below this flags a sample as singular.
    pub sigma_threshold: f64,
    /// Bound on the chart residuals of `a` and `c`.
    pub chart_residual: f64,
    /// Radius of the sampled free chart coordinates.
    pub chart_radius: f64,
    /// Bound on endpoint error and commutator residual of the synthesized paths.
    pub path_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { sigma_threshold: 1e-6, chart_residual: 1e-8, chart_radius: 0.1, path_residual: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub family: FamilySource,
    /// Smoothness-scan samples.
    pub n_samples: usize,
    pub seed: u64,
    /// Samples per commuting path.
    pub grid: usize,
    /// Samples of the collar commutator loop.
    pub loop_grid: usize,
    /// Sampled points for the exact invariance cross-check.
    pub invariance_samples: usize,
    /// Sampled free coordinates for the chart residuals.
    pub chart_samples: usize,
    /// Worker threads for the smoothness scan (0 = rayon's global pool).
    pub workers: usize,
    pub tolerances: Tolerances,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            family: FamilySource::Catalog(Family::Xd { d: 4, n: 3 }),
            n_samples: 1000,
            seed: 0,
            grid: DEFAULT_GRID,
            loop_grid: DEFAULT_LOOP_GRID,
            invariance_samples: 20,
            chart_samples: 100,
            workers: 0,
            tolerances: Tolerances::default(),
        }
    }
}

impl PipelineConfig {
    pub fn for_family(family: Family) -> Self {
        Self { family: FamilySource::Catalog(family), ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PipelineError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("sigma_threshold", t.sigma_threshold),
            ("chart_residual", t.chart_residual),
            ("chart_radius", t.chart_radius),
            ("path_residual", t.path_residual),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PipelineError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.n_samples == 0 {
            return Err(PipelineError::Config("n_samples must be positive".into()));
        }
        if self.chart_samples == 0 {
            return Err(PipelineError::Config("chart_samples must be positive".into()));
        }
        Ok(())
    }

    /// Builds the polynomial system named by [`PipelineConfig::family`].
    pub fn build_system(&self) -> Result<CatalogEntry> {
        match &self.family {
            FamilySource::Catalog(f) => Ok(family_catalog(f)?),
            FamilySource::File { polynomial_file, factor_dims } => {
                let text = std::fs::read_to_string(polynomial_file).map_err(|source| PipelineError::Io {
                    path: polynomial_file.display().to_string(),
                    source,
                })?;
                let system = parse_system(&text, factor_dims)?;
                Ok(CatalogEntry {
                    family: Family::Custom { factor_dims: factor_dims.clone(), text },
                    system,
                    substitutions: Vec::new(),
                })
            }
        }
    }
}
