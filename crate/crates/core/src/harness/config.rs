use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::phase::TorusPoint;
use crate::sparse::Ensemble;
use crate::weights::WeightSpec;

pub const SCHEMA_VERSION: u32 = 1;
/// Largest `j` in a sweep.
pub const MAX_SWEEP_J: u32 = 16;
/// Largest level for projection and transfer experiments.
pub const MAX_PROJECTION_LEVEL: u32 = 4;
pub const MAX_GRID: usize = 1 << 20;
pub const MAX_ENSEMBLE: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: Ensemble,
    pub count: usize,
}

/// Experiment configuration. Unset fields take the experiment's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<TorusPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_range: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_range: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    /// A config with only the mandatory fields set.
    pub fn new(name: &str, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            seed,
            alphas: None,
            epsilon: None,
            j_range: None,
            s_range: None,
            grid: None,
            lengths: None,
            ensemble: None,
            r: None,
            s: None,
            weights: None,
            out_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if let Some([lo, hi]) = self.j_range {
            if lo > hi || hi > MAX_SWEEP_J {
                return bad(format!("j_range [{lo}, {hi}] must be ordered with j <= {MAX_SWEEP_J}"));
            }
        }
        if let Some([lo, hi]) = self.s_range {
            let cap = if self.name == "gauss-decay" {
                crate::number_theory::MAX_LEVEL
            } else {
                MAX_PROJECTION_LEVEL
            };
            if lo == 0 || lo > hi || hi > cap {
                return bad(format!("s_range [{lo}, {hi}] must satisfy 1 <= lo <= hi <= {cap}"));
            }
        }
        if let Some(g) = self.grid {
            if g == 0 || g > MAX_GRID {
                return bad(format!("grid {g} must lie in 1..=2^20"));
            }
        }
        if let Some(ls) = &self.lengths {
            if ls.iter().any(|&n| n == 0 || n > MAX_GRID) {
                return bad("signal lengths must lie in 1..=2^20".into());
            }
        }
        if let Some(e) = &self.ensemble {
            if e.count == 0 || e.count > MAX_ENSEMBLE {
                return bad(format!("ensemble count {} must lie in 1..={MAX_ENSEMBLE}", e.count));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps < 0.5) {
                return bad(format!("epsilon {eps} must lie in (0, 1/2)"));
            }
        }
        for (k, v) in [("r", self.r), ("s", self.s)] {
            if let Some(v) = v {
                if !(v >= 1.0 && v.is_finite()) {
                    return bad(format!("exponent {k} = {v} must be finite and >= 1"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        let e = ExperimentConfig::from_json(r#"{"schema_version": 1, "name": "bessel"}"#);
        assert!(matches!(e, Err(LabError::Config(_))));
    }

    #[test]
    fn fractions_as_strings() {
        let c = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "name": "sparse-ratio", "seed": 3, "alphas": ["1/3", 0.25, "golden-1"]}"#,
        )
        .unwrap();
        let a = c.alphas.as_ref().unwrap();
        assert_eq!(a[0], TorusPoint::rational(1, 3).unwrap());
        let back = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(c.to_json().unwrap().contains("\"1/3\""));
    }

    #[test]
    fn caps() {
        let mut c = ExperimentConfig::new("minor-arc-decay", 1);
        c.j_range = Some([8, 17]);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new("bessel", 1);
        c.s_range = Some([1, 5]);
        assert!(c.validate().is_err());
        c.name = "gauss-decay".into();
        assert!(c.validate().is_ok());
        let mut c = ExperimentConfig::new("x", 1);
        c.grid = Some((1 << 20) + 1);
        assert!(c.validate().is_err());
        c.grid = None;
        c.schema_version = 2;
        assert!(c.validate().is_err());
    }
}
