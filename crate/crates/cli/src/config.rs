//! JSON run configuration shared by all subcommands.

use std::path::PathBuf;

use anosovq_core::cocycle::IntegratorConfig;
use anosovq_core::hull::{DrivingSpec, FrequencyVector, HullPoint, TrigPolynomial, TrigTerm};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<TermConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub k: Vec<i32>,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EGridConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_renorm")]
    pub renorm_interval: f64,
}

fn default_step() -> f64 {
    1e-3
}

fn default_renorm() -> f64 {
    1.0
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            step: default_step(),
            renorm_interval: default_renorm(),
        }
    }
}

fn default_horizon() -> f64 {
    200.0
}

fn default_directions() -> usize {
    16
}

fn default_period_samples() -> usize {
    128
}

fn default_cat_t() -> f64 {
    1.0
}

/// One JSON document configures every mode; mode-specific fields are only
/// required by the mode that consumes them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    #[serde(default)]
    pub omega: Vec<f64>,
    #[serde(rename = "E", default)]
    pub e: Option<f64>,
    #[serde(rename = "E_grid", default)]
    pub e_grid: Option<EGridConfig>,
    #[serde(default)]
    pub potential: Option<PotentialConfig>,
    #[serde(default)]
    pub theta0: Option<Vec<f64>>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default = "default_period_samples")]
    pub period_samples: usize,
    #[serde(rename = "cat_T", default = "default_cat_t")]
    pub cat_t: f64,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.dimension == 0 {
            return Err("dimension must be ≥ 1".into());
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err("horizon must be positive".into());
        }
        if let Some(grid) = &self.e_grid {
            if grid.count == 0 {
                return Err("E_grid.count must be ≥ 1".into());
            }
            if grid.min > grid.max || grid.min.is_nan() || grid.max.is_nan() {
                return Err("E_grid.min must not exceed E_grid.max".into());
            }
        }
        if self.directions < 4 {
            return Err("directions must be ≥ 4".into());
        }
        if self.period_samples < 4 || self.period_samples % 4 != 0 {
            return Err("period_samples must be a multiple of 4 and ≥ 4".into());
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            step: self.integrator.step,
            renorm_interval: self.integrator.renorm_interval,
        }
    }

    pub fn theta0(&self) -> Result<HullPoint, String> {
        match &self.theta0 {
            Some(angles) => {
                if angles.len() != self.dimension {
                    return Err("theta0 length must equal dimension".into());
                }
                HullPoint::new(angles.clone()).map_err(|e| e.to_string())
            }
            None => Ok(HullPoint::origin(self.dimension)),
        }
    }

    fn frequency(&self) -> Result<FrequencyVector, String> {
        if self.omega.len() != self.dimension {
            return Err("omega length must equal dimension".into());
        }
        FrequencyVector::new(self.omega.clone()).map_err(|e| e.to_string())
    }

    fn trig_polynomial(&self) -> Result<TrigPolynomial, String> {
        let (constant, terms) = match &self.potential {
            Some(p) => (
                p.constant,
                p.terms
                    .iter()
                    .map(|t| TrigTerm {
                        k: t.k.clone(),
                        a: t.a,
                        b: t.b,
                    })
                    .collect(),
            ),
            None => (0.0, Vec::new()),
        };
        TrigPolynomial::new(self.dimension, constant, terms).map_err(|e| e.to_string())
    }

    /// Driving spec at a given spectral parameter (scan mode varies it).
    pub fn spec_at(&self, e: f64) -> Result<DrivingSpec, String> {
        DrivingSpec::new(self.trig_polynomial()?, e, self.frequency()?).map_err(|e| e.to_string())
    }

    /// Driving spec at the configured `E` (required outside scan mode).
    pub fn spec(&self) -> Result<DrivingSpec, String> {
        let e = self.e.ok_or("config key \"E\" is required for this mode")?;
        self.spec_at(e)
    }

    /// Spectral-parameter grid for scan mode.
    pub fn grid(&self) -> Result<Vec<f64>, String> {
        let g = self
            .e_grid
            .as_ref()
            .ok_or("config key \"E_grid\" is required for scan mode")?;
        if g.count == 1 {
            return Ok(vec![g.min]);
        }
        Ok((0..g.count)
            .map(|k| g.min + (g.max - g.min) * k as f64 / (g.count - 1) as f64)
            .collect())
    }

    /// Period of the driving for `dimension == 1` specs.
    pub fn period(&self) -> Result<f64, String> {
        if self.dimension != 1 {
            return Err("period is only defined for dimension 1".into());
        }
        let w = self.omega[0].abs();
        if w == 0.0 {
            return Err("omega must be nonzero to define a period".into());
        }
        Ok(std::f64::consts::TAU / w)
    }
}
