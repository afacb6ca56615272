use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

pub const SCENARIO_1_JSON: &str = include_str!("../../data/scenario1.json");
pub const SCENARIO_2_JSON: &str = include_str!("../../data/scenario2.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub north_ft: f64,
    pub east_ft: f64,
    pub altitude_ft: f64,
}

impl Waypoint {
    /// NED coordinates, down positive.
    pub fn ned(&self) -> [f64; 3] {
        [self.north_ft, self.east_ft, -self.altitude_ft]
    }
}

/// Where and how the aircraft starts: a wings-level trim at the given speed
/// and altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub vt_ftps: f64,
    pub altitude_ft: f64,
    #[serde(default)]
    pub north_ft: f64,
    #[serde(default)]
    pub east_ft: f64,
    #[serde(default)]
    pub heading_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Airspace {
    pub north_ft: [f64; 2],
    pub east_ft: [f64; 2],
}

impl Default for Airspace {
    fn default() -> Self {
        Airspace {
            north_ft: [0.0, 20000.0],
            east_ft: [-12000.0, 4000.0],
        }
    }
}

fn default_r_threshold() -> f64 {
    250.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_time_limit() -> f64 {
    200.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub waypoints: Vec<Waypoint>,
    /// Capture radius on slant range (ft).
    #[serde(default = "default_r_threshold")]
    pub r_threshold_ft: f64,
    pub initial: InitialCondition,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default = "default_time_limit")]
    pub time_limit_s: f64,
    #[serde(default)]
    pub airspace: Airspace,
}

impl ScenarioConfig {
    pub fn from_json_str(json: &str) -> Result<Self> {
        let s: ScenarioConfig =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let s: ScenarioConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        s.validate()?;
        Ok(s)
    }

    /// The bundled minimum-radius-turn scenario (four waypoints).
    pub fn scenario1() -> Self {
        Self::from_json_str(SCENARIO_1_JSON).expect("bundled scenario 1 is valid")
    }

    /// The bundled gentle scenario (three waypoints).
    pub fn scenario2() -> Self {
        Self::from_json_str(SCENARIO_2_JSON).expect("bundled scenario 2 is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("scenario '{}': {msg}", self.name)));
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} unsupported (expected {SCENARIO_SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.waypoints.is_empty() {
            return bad("needs at least one waypoint".into());
        }
        if !(self.dt_s > 0.0 && self.dt_s.is_finite()) {
            return bad(format!("dt_s must be positive, got {}", self.dt_s));
        }
        if !(self.time_limit_s > 0.0 && self.time_limit_s.is_finite()) {
            return bad(format!(
                "time_limit_s must be positive, got {}",
                self.time_limit_s
            ));
        }
        if !(self.r_threshold_ft > 0.0) {
            return bad(format!(
                "r_threshold_ft must be positive, got {}",
                self.r_threshold_ft
            ));
        }
        let a = &self.airspace;
        if !(a.north_ft[0] < a.north_ft[1] && a.east_ft[0] < a.east_ft[1]) {
            return bad("airspace bounds must be increasing".into());
        }
        let inside = |n: f64, e: f64| {
            (a.north_ft[0]..=a.north_ft[1]).contains(&n)
                && (a.east_ft[0]..=a.east_ft[1]).contains(&e)
        };
        for (i, w) in self.waypoints.iter().enumerate() {
            if !(w.north_ft.is_finite() && w.east_ft.is_finite() && w.altitude_ft > 0.0) {
                return bad(format!("waypoint {i} is not a finite point above ground"));
            }
            if !inside(w.north_ft, w.east_ft) {
                return bad(format!(
                    "waypoint {i} ({}, {}) lies outside the airspace",
                    w.north_ft, w.east_ft
                ));
            }
        }
        let ic = &self.initial;
        if !(ic.vt_ftps > 0.0 && ic.altitude_ft > 0.0 && ic.heading_deg.is_finite()) {
            return bad("initial condition needs positive speed and altitude".into());
        }
        Ok(())
    }

    /// Number of integration steps before the time limit.
    pub fn max_steps(&self) -> usize {
        (self.time_limit_s / self.dt_s).round() as usize
    }

    /// Time of step `k`. When `1 / dt` is a whole number the division form
    /// keeps decimal step times exact (`38.363`, not `38.363000000000004`).
    pub fn time_of(&self, k: usize) -> f64 {
        let rate = 1.0 / self.dt_s;
        if (rate - rate.round()).abs() < 1e-9 * rate {
            k as f64 / rate.round()
        } else {
            k as f64 * self.dt_s
        }
    }

    pub fn waypoints_ned(&self) -> Vec<[f64; 3]> {
        self.waypoints.iter().map(Waypoint::ned).collect()
    }
}
