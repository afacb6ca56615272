//! Wings-level, constant-altitude trim.

use super::engine::throttle_gearing;
use super::eom::state_derivative;
use super::params::AircraftParams;
use super::state::AircraftState;
use crate::control::CommandVector;
use crate::error::{Error, Result};
use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimGuess {
    pub alpha: f64,
    pub elevator: f64,
    pub throttle: f64,
}

impl Default for TrimGuess {
    fn default() -> Self {
        Self {
            alpha: 0.03,
            elevator: -0.03,
            throttle: 0.15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimPoint {
    pub state: AircraftState,
    pub command: CommandVector,
    /// Largest absolute derivative among the non-position states.
    pub residual: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 60;
const TOLERANCE: f64 = 1e-11;

fn level_state(vt: f64, alt: f64, alpha: f64, power: f64) -> AircraftState {
    AircraftState {
        theta: alpha,
        z_e: -alt,
        pow: power,
        ..Default::default()
    }
    .with_wind_axes(vt, alpha, 0.0)
}

fn candidate(
    vt: f64,
    alt: f64,
    x: &Vector3<f64>,
    params: &AircraftParams,
) -> (AircraftState, CommandVector) {
    let (alpha, elevator, throttle) = (x[0], x[1], x[2]);
    let power = throttle_gearing(params.engine.lag, throttle);
    let cmd = CommandVector {
        throttle,
        elevator,
        aileron: 0.0,
        rudder: 0.0,
    };
    (level_state(vt, alt, alpha, power), cmd)
}

fn residual(vt: f64, alt: f64, x: &Vector3<f64>, params: &AircraftParams) -> Result<Vector3<f64>> {
    let (s, cmd) = candidate(vt, alt, x, params);
    let d = state_derivative(&s, &cmd, params).map_err(|fault| {
        Error::Config(format!("trim candidate left the model envelope: {fault}"))
    })?;
    // Scale to comparable magnitudes: ft/s² vs rad/s².
    Ok(Vector3::new(d.u, d.w, d.q * 100.0))
}

/// Largest absolute derivative of the dynamic (non-position) states.
pub fn dynamic_residual(
    state: &AircraftState,
    cmd: &CommandVector,
    params: &AircraftParams,
) -> Result<f64> {
    let d = state_derivative(state, cmd, params).map_err(|f| Error::Numeric(f.to_string()))?;
    let dyn_terms = [d.u, d.v, d.w, d.phi, d.theta, d.psi, d.p, d.q, d.r, d.pow];
    Ok(dyn_terms.iter().fold(0.0, |m: f64, x| m.max(x.abs())))
}

/// Solves for angle of attack, elevator and throttle giving steady level
/// flight at `vt` (ft/s) and `alt` (ft), heading north.
pub fn trim(vt: f64, alt: f64, params: &AircraftParams) -> Result<TrimPoint> {
    trim_from(vt, alt, params, TrimGuess::default())
}

pub fn trim_from(
    vt: f64,
    alt: f64,
    params: &AircraftParams,
    guess: TrimGuess,
) -> Result<TrimPoint> {
    if !(vt > 0.0 && alt > 0.0) {
        return Err(Error::Config(format!(
            "trim target must have positive speed and altitude (vt={vt}, h={alt})"
        )));
    }
    let mut x = Vector3::new(guess.alpha, guess.elevator, guess.throttle);
    let mut f = residual(vt, alt, &x, params)?;
    let h = 1e-7;
    for iteration in 1..=MAX_ITERATIONS {
        let mut jac = Matrix3::zeros();
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let col =
                (residual(vt, alt, &xp, params)? - residual(vt, alt, &xm, params)?) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let step = jac
            .lu()
            .solve(&(-f))
            .ok_or_else(|| Error::Numeric("singular trim Jacobian".into()))?;

        // Backtracking keeps early iterates inside the envelope.
        let mut lambda = 1.0;
        let base = f.norm();
        loop {
            let trial = x + step * lambda;
            match residual(vt, alt, &trial, params) {
                Ok(ft) if ft.norm() < base || lambda < 1e-3 => {
                    x = trial;
                    f = ft;
                    break;
                }
                _ if lambda < 1e-3 => {
                    return Err(Error::Trim {
                        iterations: iteration,
                        residual: base,
                    })
                }
                _ => lambda *= 0.5,
            }
        }

        if f.amax() < TOLERANCE {
            let (state, command) = candidate(vt, alt, &x, params);
            let residual = dynamic_residual(&state, &command, params)?;
            if !(0.0..=1.0).contains(&command.throttle) {
                return Err(Error::Config(format!(
                    "trim at vt={vt} ft/s, h={alt} ft needs throttle {:.3} outside [0, 1]",
                    command.throttle
                )));
            }
            return Ok(TrimPoint {
                state,
                command,
                residual,
                iterations: iteration,
            });
        }
    }
    Err(Error::Trim {
        iterations: MAX_ITERATIONS,
        residual: f.amax(),
    })
}
