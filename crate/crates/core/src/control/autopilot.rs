//! Waypoint guidance and the PD autopilot producing the inner-loop reference.

use super::command::ReferenceVector;
use crate::dynamics::AircraftState;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutopilotGains {
    pub k_psi_p: f64,
    pub k_psi_d: f64,
    pub k_phi_p: f64,
    pub k_phi_d: f64,
    /// Load factor per foot of altitude error.
    pub k_z_p: f64,
    /// Load factor per ft/s of climb rate.
    pub k_z_d: f64,
    /// Throttle fraction per ft/s of airspeed error.
    pub k_vt: f64,
    /// Bank limit (rad).
    pub phi_max: f64,
    /// Bounds on the commanded load-factor increment (g).
    #[serde(default = "default_nz_limits")]
    pub nz_limits: [f64; 2],
    /// Adds the `1/cos φ − 1` increment needed to hold altitude in a
    /// banked turn.
    #[serde(default)]
    pub turn_compensation: bool,
}

fn default_nz_limits() -> [f64; 2] {
    [-2.0, 6.0]
}

impl AutopilotGains {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.k_psi_p, self.k_phi_p, self.k_z_p, self.k_vt];
        let non_negative = [self.k_psi_d, self.k_phi_d, self.k_z_d];
        if positive.iter().any(|k| !(*k > 0.0)) || non_negative.iter().any(|k| !(*k >= 0.0)) {
            return Err(Error::Config(
                "autopilot proportional gains must be > 0 and derivative gains >= 0".into(),
            ));
        }
        if !(self.phi_max > 0.0 && self.phi_max < PI / 2.0) {
            return Err(Error::Config(format!(
                "phi_max {} must lie in (0, pi/2)",
                self.phi_max
            )));
        }
        if !(self.nz_limits[0] < 0.0 && self.nz_limits[1] > 0.0) {
            return Err(Error::Config("nz_limits must bracket zero".into()));
        }
        Ok(())
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guidance {
    pub psi_cmd: f64,
    pub slant_range: f64,
    /// Waypoint minus position, NED (ft).
    pub delta: [f64; 3],
}

/// Heading and slant range to a NED waypoint. When the aircraft sits
/// exactly on the waypoint the heading falls back to `previous_psi_cmd`.
pub fn waypoint_guidance(
    state: &AircraftState,
    waypoint: [f64; 3],
    previous_psi_cmd: f64,
) -> Guidance {
    let delta = [
        waypoint[0] - state.x_e,
        waypoint[1] - state.y_e,
        waypoint[2] - state.z_e,
    ];
    let slant_range = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
    let psi_cmd = if delta[0] == 0.0 && delta[1] == 0.0 {
        previous_psi_cmd
    } else {
        wrap_angle(delta[1].atan2(delta[0]))
    };
    Guidance {
        psi_cmd,
        slant_range,
        delta,
    }
}

/// Speed, altitude and heading targets for the autopilot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutopilotTarget {
    pub psi_cmd: f64,
    pub h_cmd: f64,
    pub vt_cmd: f64,
    pub throttle_trim: f64,
}

/// Intermediate autopilot signals, kept for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutopilotOutput {
    pub reference: ReferenceVector,
    pub phi_cmd: f64,
    pub heading_error: f64,
}

/// Climb rate from the navigation equation.
pub fn climb_rate(state: &AircraftState) -> f64 {
    // Third row of the body-to-earth rotation; independent of heading.
    let (sf, cf) = state.phi.sin_cos();
    let (st, ct) = state.theta.sin_cos();
    st * state.u - sf * ct * state.v - cf * ct * state.w
}

pub fn autopilot_references(
    state: &AircraftState,
    target: &AutopilotTarget,
    gains: &AutopilotGains,
) -> AutopilotOutput {
    let heading_error = wrap_angle(target.psi_cmd - state.psi);
    let phi_cmd = (gains.k_psi_p * heading_error - gains.k_psi_d * state.r)
        .clamp(-gains.phi_max, gains.phi_max);
    let ps = gains.k_phi_p * (phi_cmd - state.phi) - gains.k_phi_d * state.p;

    let h_dot = climb_rate(state);
    let mut nz = gains.k_z_p * (target.h_cmd - state.altitude()) - gains.k_z_d * h_dot;
    if gains.turn_compensation {
        let phi = state.phi.clamp(-gains.phi_max, gains.phi_max);
        nz += 1.0 / phi.cos() - 1.0;
    }
    let nz = nz.clamp(gains.nz_limits[0], gains.nz_limits[1]);
    let throttle =
        (gains.k_vt * (target.vt_cmd - state.vt()) + target.throttle_trim).clamp(0.0, 1.0);

    AutopilotOutput {
        reference: ReferenceVector {
            nz,
            ps,
            nyr: 0.0,
            throttle,
        },
        phi_cmd,
        heading_error,
    }
}

/// Mission progress through an ordered waypoint list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaypointStatus {
    Active { index: usize, guidance: Guidance },
    Done { psi_hold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaypointManager {
    index: usize,
    psi_cmd: f64,
    done_heading: Option<f64>,
}

impl WaypointManager {
    pub fn new(initial_heading: f64) -> Self {
        WaypointManager {
            index: 0,
            psi_cmd: initial_heading,
            done_heading: None,
        }
    }

    /// Number of waypoints captured so far.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_done(&self) -> bool {
        self.done_heading.is_some()
    }

    /// Advances past the active waypoint when the slant range drops strictly
    /// below `r_threshold`; at most one capture per call.
    pub fn update(
        &mut self,
        state: &AircraftState,
        waypoints: &[[f64; 3]],
        r_threshold: f64,
    ) -> WaypointStatus {
        if let Some(psi_hold) = self.done_heading {
            return WaypointStatus::Done { psi_hold };
        }
        if self.index >= waypoints.len() {
            return self.finish(state);
        }
        let g = waypoint_guidance(state, waypoints[self.index], self.psi_cmd);
        if g.slant_range < r_threshold {
            self.index += 1;
            if self.index == waypoints.len() {
                return self.finish(state);
            }
            let g = waypoint_guidance(state, waypoints[self.index], self.psi_cmd);
            self.psi_cmd = g.psi_cmd;
            return WaypointStatus::Active {
                index: self.index,
                guidance: g,
            };
        }
        self.psi_cmd = g.psi_cmd;
        WaypointStatus::Active {
            index: self.index,
            guidance: g,
        }
    }

    fn finish(&mut self, state: &AircraftState) -> WaypointStatus {
        let psi_hold = wrap_angle(state.psi);
        self.done_heading = Some(psi_hold);
        WaypointStatus::Done { psi_hold }
    }
}
