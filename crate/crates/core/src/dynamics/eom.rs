//! Rigid-body equations of motion on a flat, non-rotating earth.

use super::aero::{aero_coefficients, AeroCoefficients, AeroInput};
use super::atmosphere::air_data;
use super::engine::{power_rate, thrust};
use super::params::AircraftParams;
use super::state::AircraftState;
use crate::control::CommandVector;
use std::fmt;

/// Conditions under which the plant can no longer be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsFault {
    /// Pitch within the guard margin of ±90°.
    AttitudeSingularity,
    /// Flow angles outside the aerodynamic model's validity range.
    EnvelopeExit,
    /// Non-finite state or derivative, or zero airspeed.
    NumericDivergence,
}

impl fmt::Display for DynamicsFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DynamicsFault::AttitudeSingularity => "attitude singularity",
            DynamicsFault::EnvelopeExit => "aerodynamic envelope exit",
            DynamicsFault::NumericDivergence => "numeric divergence",
        })
    }
}

impl std::error::Error for DynamicsFault {}

/// Body-axis aerodynamic, gravity and thrust loads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcesMoments {
    /// Aerodynamic forces X, Y, Z (lbf).
    pub aero: [f64; 3],
    /// Gravity in body axes (lbf).
    pub gravity: [f64; 3],
    /// Thrust along the body x axis (lbf).
    pub thrust: f64,
    /// Rolling, pitching, yawing moments L, M, N (ft·lbf).
    pub moments: [f64; 3],
    pub coefficients: AeroCoefficients,
    pub dynamic_pressure: f64,
    /// `sin`/`cos` of roll and pitch, reused by the kinematic equations.
    pub(crate) attitude: [(f64, f64); 2],
}

impl ForcesMoments {
    pub fn total_force(&self) -> [f64; 3] {
        [
            self.aero[0] + self.gravity[0] + self.thrust,
            self.aero[1] + self.gravity[1],
            self.aero[2] + self.gravity[2],
        ]
    }
}

/// Body-to-earth rotation `Rz(ψ) Ry(θ) Rx(φ)`.
pub fn body_to_earth(phi: f64, theta: f64, psi: f64) -> [[f64; 3]; 3] {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (ss, cs) = psi.sin_cos();
    [
        [ct * cs, sf * st * cs - cf * ss, cf * st * cs + sf * ss],
        [ct * ss, sf * st * ss + cf * cs, cf * st * ss - sf * cs],
        [-st, sf * ct, cf * ct],
    ]
}

fn check_state(
    state: &AircraftState,
    vt: f64,
    params: &AircraftParams,
) -> Result<(), DynamicsFault> {
    if !state.is_finite() || vt <= 1e-6 {
        return Err(DynamicsFault::NumericDivergence);
    }
    let margin = params.limits.theta_margin_deg.to_radians();
    if state.theta.abs() >= std::f64::consts::FRAC_PI_2 - margin {
        return Err(DynamicsFault::AttitudeSingularity);
    }
    Ok(())
}

fn flow_angles_inside(alpha: f64, beta: f64, params: &AircraftParams) -> bool {
    let l = &params.limits;
    let (alpha, beta) = (alpha.to_degrees(), beta.to_degrees());
    alpha >= l.alpha_min_deg && alpha <= l.alpha_max_deg && beta.abs() <= l.beta_max_deg
}

/// Whether the flow angles lie inside the aerodynamic model's envelope.
pub fn in_envelope(state: &AircraftState, params: &AircraftParams) -> bool {
    flow_angles_inside(state.alpha(), state.beta(), params)
}

pub fn forces_moments(
    state: &AircraftState,
    controls: &CommandVector,
    params: &AircraftParams,
) -> Result<ForcesMoments, DynamicsFault> {
    let vt = state.vt();
    check_state(state, vt, params)?;
    let (alpha, beta) = (state.alpha(), (state.v / vt).clamp(-1.0, 1.0).asin());
    if !flow_angles_inside(alpha, beta, params) {
        return Err(DynamicsFault::EnvelopeExit);
    }
    let air = air_data(vt, state.altitude());
    let coefficients = aero_coefficients(
        &AeroInput {
            alpha,
            beta,
            p: state.p,
            q: state.q,
            r: state.r,
            elevator: controls.elevator,
            aileron: controls.aileron,
            rudder: controls.rudder,
            vt,
        },
        params,
    );
    let qs = air.dynamic_pressure * params.geometry.wing_area_ft2;
    let mg = params.mass_slug * params.g;
    let (sf, cf) = state.phi.sin_cos();
    let (st, ct) = state.theta.sin_cos();
    Ok(ForcesMoments {
        aero: [
            qs * coefficients.cx,
            qs * coefficients.cy,
            qs * coefficients.cz,
        ],
        gravity: [-mg * st, mg * ct * sf, mg * ct * cf],
        thrust: thrust(&params.engine, state.pow, state.altitude(), air.mach),
        moments: [
            qs * params.geometry.span_ft * coefficients.cl,
            qs * params.geometry.chord_ft * coefficients.cm,
            qs * params.geometry.span_ft * coefficients.cn,
        ],
        coefficients,
        dynamic_pressure: air.dynamic_pressure,
        attitude: [(sf, cf), (st, ct)],
    })
}

/// Normal and lateral load factors sensed at the centre of gravity
/// (`n_z` is 1 in unaccelerated level flight at zero pitch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadFactors {
    pub nz: f64,
    pub ny: f64,
}

pub fn load_factors(fm: &ForcesMoments, params: &AircraftParams) -> LoadFactors {
    let mg = params.mass_slug * params.g;
    LoadFactors {
        nz: -fm.aero[2] / mg,
        ny: fm.aero[1] / mg,
    }
}

/// Time derivative of the full state under constant controls.
pub fn state_derivative(
    state: &AircraftState,
    controls: &CommandVector,
    params: &AircraftParams,
) -> Result<AircraftState, DynamicsFault> {
    let fm = forces_moments(state, controls, params)?;
    Ok(derivative_from_loads(state, controls, &fm, params))
}

/// State derivative from loads already evaluated at `s`.
pub fn derivative_from_loads(
    s: &AircraftState,
    controls: &CommandVector,
    fm: &ForcesMoments,
    params: &AircraftParams,
) -> AircraftState {
    let m = params.mass_slug;
    let [fx, fy, fz] = fm.total_force();
    let (u, v, w, p, q, r) = (s.u, s.v, s.w, s.p, s.q, s.r);

    let u_dot = fx / m + r * v - q * w;
    let v_dot = fy / m + p * w - r * u;
    let w_dot = fz / m + q * u - p * v;

    let [(sf, cf), (st, ct)] = fm.attitude;
    let (ss, cs) = s.psi.sin_cos();
    // Body-to-earth rotation, as in `body_to_earth`.
    let rot = [
        [ct * cs, sf * st * cs - cf * ss, cf * st * cs + sf * ss],
        [ct * ss, sf * st * ss + cf * cs, cf * st * ss - sf * cs],
        [-st, sf * ct, cf * ct],
    ];
    let nav = |row: [f64; 3]| row[0] * u + row[1] * v + row[2] * w;

    let tt = st / ct;
    let phi_dot = p + (q * sf + r * cf) * tt;
    let theta_dot = q * cf - r * sf;
    let psi_dot = (q * sf + r * cf) / ct;

    let c = &params.coeffs;
    let [l, mm, n] = fm.moments;
    let p_dot = (c.c1 * r + c.c2 * p) * q + c.c3 * l + c.c4 * n;
    let q_dot = c.c5 * p * r - c.c6 * (p * p - r * r) + c.c7 * mm;
    let r_dot = (c.c8 * p - c.c2 * r) * q + c.c4 * l + c.c9 * n;

    AircraftState {
        u: u_dot,
        v: v_dot,
        w: w_dot,
        phi: phi_dot,
        theta: theta_dot,
        psi: psi_dot,
        p: p_dot,
        q: q_dot,
        r: r_dot,
        x_e: nav(rot[0]),
        y_e: nav(rot[1]),
        z_e: nav(rot[2]),
        pow: power_rate(params.engine.lag, s.pow, controls.throttle),
    }
}

/// Classical fourth-order Runge–Kutta step with the controls held over the step.
pub fn rk4_step(
    state: &AircraftState,
    controls: &CommandVector,
    dt: f64,
    params: &AircraftParams,
) -> Result<AircraftState, DynamicsFault> {
    rk4_with(state, dt, |s| state_derivative(s, controls, params))
}

/// One RK4 step of `ẋ = f(x)`.
pub fn rk4_with<F>(state: &AircraftState, dt: f64, f: F) -> Result<AircraftState, DynamicsFault>
where
    F: Fn(&AircraftState) -> Result<AircraftState, DynamicsFault>,
{
    let k1 = f(state)?;
    rk4_from_slope(state, k1, dt, f)
}

/// RK4 step of `ẋ = f(x)` given the slope `k1 = f(state)` already evaluated.
pub fn rk4_from_slope<F>(
    state: &AircraftState,
    k1: AircraftState,
    dt: f64,
    f: F,
) -> Result<AircraftState, DynamicsFault>
where
    F: Fn(&AircraftState) -> Result<AircraftState, DynamicsFault>,
{
    let k2 = f(&(*state + k1 * (0.5 * dt)))?;
    let k3 = f(&(*state + k2 * (0.5 * dt)))?;
    let k4 = f(&(*state + k3 * dt))?;
    let next = *state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(DynamicsFault::NumericDivergence)
    }
}
