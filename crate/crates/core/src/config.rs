//! Engine configuration: machining-condition thresholds, geometric
//! tolerances, and the recognition threshold, loadable from a JSON file.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Width thresholds (model length units) that decide LONGER/SHORTER
/// machining items.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MachiningConditions {
    /// Parallel-pair widths at or above this are LONGER for face machining.
    pub slot_width_threshold: f64,
    /// Face widths at or above this are LONGER for fillet machining.
    pub fillet_width_threshold: f64,
    /// Face widths at or above this are LONGER for chamfer machining.
    pub chamfer_width_threshold: f64,
}

impl Default for MachiningConditions {
    fn default() -> Self {
        MachiningConditions {
            slot_width_threshold: 8.0,
            fillet_width_threshold: 3.0,
            chamfer_width_threshold: 3.0,
        }
    }
}

/// Geometric tolerances. Relative values scale by the model bounding-box
/// diagonal; `angular_tol` is absolute radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSettings {
    pub angular_tol: f64,
    pub length_tol_rel: f64,
    /// Offset of interference-ray origins off the surface, relative.
    pub ray_epsilon: f64,
    /// Offset of smooth-edge probe points into face interiors, relative.
    pub probe_offset_rel: f64,
}

impl Default for ToleranceSettings {
    fn default() -> Self {
        ToleranceSettings {
            angular_tol: 1e-6,
            length_tol_rel: 1e-7,
            ray_epsilon: 1e-6,
            probe_offset_rel: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecognitionSettings {
    /// A face is labeled when its best variant similarity reaches this.
    pub threshold: f64,
}

impl Default for RecognitionSettings {
    fn default() -> Self {
        RecognitionSettings { threshold: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub conditions: MachiningConditions,
    pub tolerances: ToleranceSettings,
    pub recognition: RecognitionSettings,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config schema error: {0}")]
    Schema(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.conditions;
        for (name, v) in [
            ("slot_width_threshold", c.slot_width_threshold),
            ("fillet_width_threshold", c.fillet_width_threshold),
            ("chamfer_width_threshold", c.chamfer_width_threshold),
            ("angular_tol", self.tolerances.angular_tol),
            ("length_tol_rel", self.tolerances.length_tol_rel),
            ("ray_epsilon", self.tolerances.ray_epsilon),
            ("probe_offset_rel", self.tolerances.probe_offset_rel),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} must be positive")));
            }
        }
        let t = self.recognition.threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "recognition threshold {t} must be in (0, 1]"
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<EngineConfig, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: EngineConfig =
            serde_json::from_str(&text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
