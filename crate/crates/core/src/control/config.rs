use super::autopilot::AutopilotGains;
use super::llc::{
    linearize, synthesize_gains, GainSet, GainSynthesisConfig, Linearization, OperatingPoint,
};
use crate::dynamics::{AircraftParams, TrimPoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DEFAULT_CONTROLLER_JSON: &str = include_str!("../../data/controller.json");

/// Inner-loop design: either LQR weights to synthesise from, or gains
/// computed elsewhere (checked for stability on load).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum InnerLoopDesign {
    Lqr(GainSynthesisConfig),
    Gains {
        k_long: [f64; 3],
        k_lat: [[f64; 5]; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub autopilot: AutopilotGains,
    pub inner: InnerLoopDesign,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig::from_json_str(DEFAULT_CONTROLLER_JSON)
            .expect("bundled controller config is valid")
    }
}

impl ControllerConfig {
    pub fn from_json_str(json: &str) -> Result<Self> {
        let cfg: ControllerConfig = serde_json::from_str(json)
            .map_err(|e| Error::Config(format!("controller config: {e}")))?;
        cfg.autopilot.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }
}

/// Everything the cascade needs at run time, built once per trim point and
/// shared read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerDesign {
    pub operating_point: OperatingPoint,
    pub linearization: Linearization,
    pub gains: GainSet,
    pub autopilot: AutopilotGains,
}

impl ControllerDesign {
    pub fn new(trim: &TrimPoint, params: &AircraftParams, cfg: &ControllerConfig) -> Result<Self> {
        if trim.residual > 1e-6 {
            return Err(Error::Config(format!(
                "trim residual {:e} too large to linearise about",
                trim.residual
            )));
        }
        let operating_point = OperatingPoint::from_trim(trim, params)?;
        let linearization = linearize(&operating_point, params)?;
        let gains = match &cfg.inner {
            InnerLoopDesign::Lqr(weights) => synthesize_gains(&linearization, weights)?,
            InnerLoopDesign::Gains { k_long, k_lat } => {
                GainSet::from_gains(*k_long, *k_lat, &linearization)?
            }
        };
        Ok(ControllerDesign {
            operating_point,
            linearization,
            gains,
            autopilot: cfg.autopilot,
        })
    }
}
