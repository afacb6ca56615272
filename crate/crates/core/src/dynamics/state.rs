use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul};

pub const STATE_LEN: usize = 13;

/// The thirteen simulation states: body velocities (ft/s), Euler angles
/// (rad), body rates (rad/s), NED position (ft, `z_e` down) and engine
/// power (percent).
///
/// The same layout doubles as the time derivative of a state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AircraftState {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub x_e: f64,
    pub y_e: f64,
    pub z_e: f64,
    pub pow: f64,
}

impl AircraftState {
    pub fn to_array(&self) -> [f64; STATE_LEN] {
        [
            self.u, self.v, self.w, self.phi, self.theta, self.psi, self.p, self.q, self.r,
            self.x_e, self.y_e, self.z_e, self.pow,
        ]
    }

    pub fn from_array(a: [f64; STATE_LEN]) -> Self {
        Self {
            u: a[0],
            v: a[1],
            w: a[2],
            phi: a[3],
            theta: a[4],
            psi: a[5],
            p: a[6],
            q: a[7],
            r: a[8],
            x_e: a[9],
            y_e: a[10],
            z_e: a[11],
            pow: a[12],
        }
    }

    /// True airspeed.
    pub fn vt(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    pub fn alpha(&self) -> f64 {
        self.w.atan2(self.u)
    }

    pub fn beta(&self) -> f64 {
        let vt = self.vt();
        if vt == 0.0 {
            0.0
        } else {
            (self.v / vt).clamp(-1.0, 1.0).asin()
        }
    }

    /// Altitude, `-z_e`.
    pub fn altitude(&self) -> f64 {
        -self.z_e
    }

    /// Stability-axis roll rate.
    pub fn stability_roll_rate(&self) -> f64 {
        let h = (self.u * self.u + self.w * self.w).sqrt();
        if h == 0.0 {
            self.p
        } else {
            (self.p * self.u + self.r * self.w) / h
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Sets the body velocities from wind-axis airspeed and flow angles.
    pub fn with_wind_axes(mut self, vt: f64, alpha: f64, beta: f64) -> Self {
        self.u = vt * alpha.cos() * beta.cos();
        self.v = vt * beta.sin();
        self.w = vt * alpha.sin() * beta.cos();
        self
    }
}

impl Add for AircraftState {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Mul<f64> for AircraftState {
    type Output = Self;

    fn mul(self, k: f64) -> Self {
        let a = self.to_array();
        Self::from_array(std::array::from_fn(|i| a[i] * k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn array_round_trip() {
        let a: [f64; STATE_LEN] = std::array::from_fn(|i| i as f64 * 1.5 - 3.0);
        assert_eq!(AircraftState::from_array(a).to_array(), a);
    }

    #[test]
    fn wind_axes_round_trip() {
        let s = AircraftState::default().with_wind_axes(540.0, 0.05, -0.02);
        assert_relative_eq!(s.vt(), 540.0, epsilon = 1e-10);
        assert_relative_eq!(s.alpha(), 0.05, epsilon = 1e-14);
        assert_relative_eq!(s.beta(), -0.02, epsilon = 1e-14);
    }

    #[test]
    fn altitude_is_negative_down() {
        let s = AircraftState {
            z_e: -4000.0,
            ..Default::default()
        };
        assert_eq!(s.altitude(), 4000.0);
    }
}
