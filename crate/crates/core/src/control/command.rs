use crate::dynamics::params::Limits;
use serde::{Deserialize, Serialize};

/// Surface and throttle commands sent to the airframe. Throttle is a
/// fraction in [0, 1]; surfaces are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CommandVector {
    pub throttle: f64,
    pub elevator: f64,
    pub aileron: f64,
    pub rudder: f64,
}

impl CommandVector {
    pub const ZERO: CommandVector = CommandVector {
        throttle: 0.0,
        elevator: 0.0,
        aileron: 0.0,
        rudder: 0.0,
    };

    /// Clamps every channel to the actuator limits.
    pub fn saturate(&self, limits: &Limits) -> CommandVector {
        let sym = |x: f64, deg: f64| x.clamp(-deg.to_radians(), deg.to_radians());
        CommandVector {
            throttle: self
                .throttle
                .clamp(limits.throttle_min, limits.throttle_max),
            elevator: sym(self.elevator, limits.elevator_max_deg),
            aileron: sym(self.aileron, limits.aileron_max_deg),
            rudder: sym(self.rudder, limits.rudder_max_deg),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.throttle.is_finite()
            && self.elevator.is_finite()
            && self.aileron.is_finite()
            && self.rudder.is_finite()
    }
}

/// Reference handed from the autopilot to the inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReferenceVector {
    /// Normal load factor increment over trim (g).
    pub nz: f64,
    /// Stability-axis roll rate (rad/s).
    pub ps: f64,
    /// Side acceleration plus yaw rate blend.
    pub nyr: f64,
    /// Throttle fraction.
    pub throttle: f64,
}

impl ReferenceVector {
    /// Straight and level: zero load-factor increment, roll rate and
    /// side-force blend, with the given throttle.
    pub fn level(throttle: f64) -> Self {
        ReferenceVector {
            throttle,
            ..Default::default()
        }
    }
}
