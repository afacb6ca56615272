//! Single closed-loop missions: scenario files, run configuration, the
//! simulation loop and trajectory export.

mod run;
pub mod scenario;
pub mod trajectory;

pub use run::{LinkOverride, Mission, RunOutput};
pub use scenario::{Airspace, InitialCondition, ScenarioConfig, Waypoint};
pub use trajectory::{Trajectory, TrajectoryRow, TRAJECTORY_HEADER};

use crate::channel::LossPolicy;
use crate::dynamics::DynamicsFault;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Link realisation for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p_a: f64,
    /// One-way latency (s); the command stream is delayed by `2 * epsilon`.
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub loss_policy: LossPolicy,
}

impl RunConfig {
    /// Perfect link: always on, no latency.
    pub fn ideal() -> Self {
        RunConfig {
            p_a: 1.0,
            epsilon: 0.0,
            seed: 0,
            loss_policy: LossPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_a > 0.0 && self.p_a <= 1.0) {
            return Err(Error::Config(format!(
                "p_a must lie in (0, 1], got {}",
                self.p_a
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureMode {
    Timeout,
    GroundImpact,
    AttitudeSingularity,
    EnvelopeExit,
    NumericDivergence,
}

impl FailureMode {
    pub const ALL: [FailureMode; 5] = [
        FailureMode::Timeout,
        FailureMode::GroundImpact,
        FailureMode::AttitudeSingularity,
        FailureMode::EnvelopeExit,
        FailureMode::NumericDivergence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::Timeout => "timeout",
            FailureMode::GroundImpact => "ground-impact",
            FailureMode::AttitudeSingularity => "attitude-singularity",
            FailureMode::EnvelopeExit => "envelope-exit",
            FailureMode::NumericDivergence => "numeric-divergence",
        }
    }
}

impl From<DynamicsFault> for FailureMode {
    fn from(f: DynamicsFault) -> Self {
        match f {
            DynamicsFault::AttitudeSingularity => FailureMode::AttitudeSingularity,
            DynamicsFault::EnvelopeExit => FailureMode::EnvelopeExit,
            DynamicsFault::NumericDivergence => FailureMode::NumericDivergence,
        }
    }
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FailureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FailureMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown failure mode '{s}'")))
    }
}

/// Outcome of one mission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub success: bool,
    /// Present iff `success`.
    pub completion_time: Option<f64>,
    /// Present iff not `success`.
    pub failure_mode: Option<FailureMode>,
    pub waypoints_reached: usize,
    pub p_a: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl RunRecord {
    fn new(
        run: &RunConfig,
        outcome: std::result::Result<f64, FailureMode>,
        waypoints_reached: usize,
    ) -> Self {
        let (success, completion_time, failure_mode) = match outcome {
            Ok(t) => (true, Some(t), None),
            Err(m) => (false, None, Some(m)),
        };
        RunRecord {
            success,
            completion_time,
            failure_mode,
            waypoints_reached,
            p_a: run.p_a,
            epsilon: run.epsilon,
            seed: run.seed,
        }
    }
}
