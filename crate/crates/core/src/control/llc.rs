//! Inner loops: linearisation about trim, LQR-with-integrator synthesis and
//! the per-step command law.
//!
//! Longitudinal loop: states `[Δα, q, ∫e_Nz]`, control `δe`.
//! Lateral loop: states `[β, p, r, ∫e_ps, ∫e_Nyr]`, controls `[δa, δr]`.
//! The two loops share no gain entries.

use super::command::{CommandVector, ReferenceVector};
use super::lqr::{is_hurwitz, lqr, spectral_abscissa};
use crate::dynamics::params::Limits;
use crate::dynamics::{
    forces_moments, load_factors, state_derivative, AircraftParams, AircraftState, LoadFactors,
    TrimPoint,
};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Trim condition the inner loops regulate around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub state: AircraftState,
    pub command: CommandVector,
    /// Normal load factor at trim; the loops track increments over it.
    pub nz: f64,
}

impl OperatingPoint {
    pub fn from_trim(trim: &TrimPoint, params: &AircraftParams) -> Result<Self> {
        let fm = forces_moments(&trim.state, &trim.command, params)
            .map_err(|f| Error::Numeric(f.to_string()))?;
        Ok(OperatingPoint {
            state: trim.state,
            command: trim.command,
            nz: load_factors(&fm, params).nz,
        })
    }
}

/// Short-period and lateral-directional Jacobians with their output maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    /// `[α, q]` dynamics.
    pub a_long: DMatrix<f64>,
    /// Response to `δe`.
    pub b_long: DMatrix<f64>,
    /// `Nz` output row.
    pub c_long: DMatrix<f64>,
    pub d_long: DMatrix<f64>,
    /// `[β, p, r]` dynamics.
    pub a_lat: DMatrix<f64>,
    /// Response to `[δa, δr]`.
    pub b_lat: DMatrix<f64>,
    /// `[ps, Nyr]` output rows.
    pub c_lat: DMatrix<f64>,
    pub d_lat: DMatrix<f64>,
}

fn wind_rates(s: &AircraftState, d: &AircraftState) -> (f64, f64) {
    let vt = s.vt();
    let vt_dot = (s.u * d.u + s.v * d.v + s.w * d.w) / vt;
    let alpha_dot = (s.u * d.w - s.w * d.u) / (s.u * s.u + s.w * s.w);
    let beta_dot = (d.v * vt - s.v * vt_dot) / (vt * vt * s.beta().cos());
    (alpha_dot, beta_dot)
}

struct Sample {
    rates: Vec<f64>,
    outputs: Vec<f64>,
}

fn jacobian_columns(
    x0: &[f64],
    u0: &[f64],
    step: f64,
    eval: impl Fn(&[f64], &[f64]) -> Result<Sample>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let base = eval(x0, u0)?;
    let (nx, nu, ny) = (x0.len(), u0.len(), base.outputs.len());
    let mut a = DMatrix::zeros(nx, nx);
    let mut b = DMatrix::zeros(nx, nu);
    let mut c = DMatrix::zeros(ny, nx);
    let mut d = DMatrix::zeros(ny, nu);
    let h_of = |v: f64| step * v.abs().max(1.0);
    for j in 0..nx + nu {
        let (mut xp, mut xm, mut up, mut um) = (x0.to_vec(), x0.to_vec(), u0.to_vec(), u0.to_vec());
        let h = if j < nx {
            let h = h_of(x0[j]);
            xp[j] += h;
            xm[j] -= h;
            h
        } else {
            let h = h_of(u0[j - nx]);
            up[j - nx] += h;
            um[j - nx] -= h;
            h
        };
        let (p, m) = (eval(&xp, &up)?, eval(&xm, &um)?);
        for i in 0..nx {
            let v = (p.rates[i] - m.rates[i]) / (2.0 * h);
            if j < nx {
                a[(i, j)] = v;
            } else {
                b[(i, j - nx)] = v;
            }
        }
        for i in 0..ny {
            let v = (p.outputs[i] - m.outputs[i]) / (2.0 * h);
            if j < nx {
                c[(i, j)] = v;
            } else {
                d[(i, j - nx)] = v;
            }
        }
    }
    let all = [&a, &b, &c, &d];
    if all.iter().any(|m| m.iter().any(|v| !v.is_finite())) {
        return Err(Error::Parameter(
            "linearisation produced a non-finite Jacobian".into(),
        ));
    }
    Ok((a, b, c, d))
}

/// Central-difference Jacobians about `op` with relative perturbation `step`.
pub fn linearize_with_step(
    op: &OperatingPoint,
    params: &AircraftParams,
    step: f64,
) -> Result<Linearization> {
    let vt = op.state.vt();
    let fault = |f: crate::dynamics::DynamicsFault| {
        Error::Parameter(format!("linearisation left the model: {f}"))
    };
    let loads = |s: &AircraftState, c: &CommandVector| -> Result<(AircraftState, LoadFactors)> {
        let d = state_derivative(s, c, params).map_err(fault)?;
        let fm = forces_moments(s, c, params).map_err(fault)?;
        Ok((d, load_factors(&fm, params)))
    };

    let alpha0 = op.state.alpha();
    let (a_long, b_long, c_long, d_long) =
        jacobian_columns(&[alpha0, 0.0], &[op.command.elevator], step, |x, u| {
            let s = AircraftState {
                q: x[1],
                ..op.state
            }
            .with_wind_axes(vt, x[0], 0.0);
            let c = CommandVector {
                elevator: u[0],
                ..op.command
            };
            let (d, l) = loads(&s, &c)?;
            Ok(Sample {
                rates: vec![wind_rates(&s, &d).0, d.q],
                outputs: vec![l.nz],
            })
        })?;

    let (a_lat, b_lat, c_lat, d_lat) = jacobian_columns(
        &[0.0, 0.0, 0.0],
        &[op.command.aileron, op.command.rudder],
        step,
        |x, u| {
            let s = AircraftState {
                p: x[1],
                r: x[2],
                ..op.state
            }
            .with_wind_axes(vt, alpha0, x[0]);
            let c = CommandVector {
                aileron: u[0],
                rudder: u[1],
                ..op.command
            };
            let (d, l) = loads(&s, &c)?;
            Ok(Sample {
                rates: vec![wind_rates(&s, &d).1, d.p, d.r],
                outputs: vec![s.stability_roll_rate(), l.ny + s.r],
            })
        },
    )?;

    Ok(Linearization {
        a_long,
        b_long,
        c_long,
        d_long,
        a_lat,
        b_lat,
        c_lat,
        d_lat,
    })
}

pub fn linearize(op: &OperatingPoint, params: &AircraftParams) -> Result<Linearization> {
    linearize_with_step(op, params, 1e-6)
}

fn augment(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, m, p) = (a.nrows(), b.ncols(), c.nrows());
    let mut aa = DMatrix::zeros(n + p, n + p);
    aa.view_mut((0, 0), (n, n)).copy_from(a);
    aa.view_mut((n, 0), (p, n)).copy_from(c);
    let mut bb = DMatrix::zeros(n + p, m);
    bb.view_mut((0, 0), (n, m)).copy_from(b);
    bb.view_mut((n, 0), (p, m)).copy_from(d);
    (aa, bb)
}

impl Linearization {
    /// Longitudinal plant augmented with the `Nz` error integrator.
    pub fn augmented_long(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        augment(&self.a_long, &self.b_long, &self.c_long, &self.d_long)
    }

    /// Lateral plant augmented with the `ps` and `Nyr` error integrators.
    pub fn augmented_lat(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        augment(&self.a_lat, &self.b_lat, &self.c_lat, &self.d_lat)
    }
}

/// State and control weights for one loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqrWeights {
    pub q: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
}

fn to_matrix(rows: &[Vec<f64>], n: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("{name} must be {n}x{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl LqrWeights {
    /// Diagonal weights.
    pub fn diagonal(q: &[f64], r: &[f64]) -> Self {
        let diag = |v: &[f64]| {
            (0..v.len())
                .map(|i| {
                    (0..v.len())
                        .map(|j| if i == j { v[i] } else { 0.0 })
                        .collect()
                })
                .collect()
        };
        LqrWeights {
            q: diag(q),
            r: diag(r),
        }
    }

    pub fn matrices(&self, states: usize, controls: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        Ok((
            to_matrix(&self.q, states, "Q")?,
            to_matrix(&self.r, controls, "R")?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSynthesisConfig {
    pub long: LqrWeights,
    pub lat: LqrWeights,
}

/// Inner-loop feedback gains with their closed-loop spectral abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSet {
    /// Gains on `[Δα, q, ∫e_Nz]`.
    pub k_long: [f64; 3],
    /// Rows `[δa, δr]`, columns `[β, p, r, ∫e_ps, ∫e_Nyr]`.
    pub k_lat: [[f64; 5]; 2],
    /// Largest closed-loop eigenvalue real part, longitudinal.
    pub long_abscissa: f64,
    /// Largest closed-loop eigenvalue real part, lateral.
    pub lat_abscissa: f64,
}

impl GainSet {
    /// Wraps given gains after checking both augmented closed loops are
    /// Hurwitz.
    pub fn from_gains(k_long: [f64; 3], k_lat: [[f64; 5]; 2], lin: &Linearization) -> Result<Self> {
        let (al, bl) = lin.augmented_long();
        let (at, bt) = lin.augmented_lat();
        let kl = DMatrix::from_row_slice(1, 3, &k_long);
        let kt = DMatrix::from_fn(2, 5, |i, j| k_lat[i][j]);
        let cl_long = al - bl * kl;
        let cl_lat = at - bt * kt;
        if !is_hurwitz(&cl_long) || !is_hurwitz(&cl_lat) {
            return Err(Error::Synthesis(
                "inner-loop gains do not stabilise the linearised plant".into(),
            ));
        }
        Ok(GainSet {
            k_long,
            k_lat,
            long_abscissa: spectral_abscissa(&cl_long),
            lat_abscissa: spectral_abscissa(&cl_lat),
        })
    }

    pub fn zero() -> Self {
        GainSet {
            k_long: [0.0; 3],
            k_lat: [[0.0; 5]; 2],
            long_abscissa: f64::NAN,
            lat_abscissa: f64::NAN,
        }
    }
}

pub fn synthesize_gains(lin: &Linearization, cfg: &GainSynthesisConfig) -> Result<GainSet> {
    let (al, bl) = lin.augmented_long();
    let (ql, rl) = cfg.long.matrices(3, 1)?;
    let kl = lqr(&al, &bl, &ql, &rl)?;
    let (at, bt) = lin.augmented_lat();
    let (qt, rt) = cfg.lat.matrices(5, 2)?;
    let kt = lqr(&at, &bt, &qt, &rt)?;
    GainSet::from_gains(
        [kl[(0, 0)], kl[(0, 1)], kl[(0, 2)]],
        [
            std::array::from_fn(|j| kt[(0, j)]),
            std::array::from_fn(|j| kt[(1, j)]),
        ],
        lin,
    )
}

/// Error integrators carried between steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Integrators {
    pub nz: f64,
    pub ps: f64,
    pub nyr: f64,
}

/// Measured loop outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopOutputs {
    /// `Nz` increment over trim.
    pub nz: f64,
    pub ps: f64,
    pub nyr: f64,
}

pub fn loop_outputs(
    state: &AircraftState,
    loads: &LoadFactors,
    op: &OperatingPoint,
) -> LoopOutputs {
    LoopOutputs {
        nz: loads.nz - op.nz,
        ps: state.stability_roll_rate(),
        nyr: loads.ny + state.r,
    }
}

fn saturation_side(raw: f64, sat: f64) -> f64 {
    if raw > sat {
        1.0
    } else if raw < sat {
        -1.0
    } else {
        0.0
    }
}

/// Command computed from the current integrators, before they advance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerLoopStep {
    pub command: CommandVector,
    raw: CommandVector,
}

/// Saturated command from the current state and integrators.
pub fn inner_loop(
    state: &AircraftState,
    reference: &ReferenceVector,
    gains: &GainSet,
    op: &OperatingPoint,
    integrators: &Integrators,
    limits: &Limits,
) -> InnerLoopStep {
    let xl = [state.alpha() - op.state.alpha(), state.q, integrators.nz];
    let xt = [
        state.beta(),
        state.p,
        state.r,
        integrators.ps,
        integrators.nyr,
    ];
    let dot = |k: &[f64], x: &[f64]| k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();

    let raw = CommandVector {
        throttle: reference.throttle,
        elevator: op.command.elevator - dot(&gains.k_long, &xl),
        aileron: op.command.aileron - dot(&gains.k_lat[0], &xt),
        rudder: op.command.rudder - dot(&gains.k_lat[1], &xt),
    };
    InnerLoopStep {
        command: raw.saturate(limits),
        raw,
    }
}

impl InnerLoopStep {
    /// Advances the integrators by `dt`. An integrator is held whenever its
    /// update would drive a saturated actuator further into its limit.
    pub fn integrate(
        &self,
        outputs: &LoopOutputs,
        reference: &ReferenceVector,
        gains: &GainSet,
        integrators: &mut Integrators,
        dt: f64,
    ) {
        let (raw, cmd) = (&self.raw, &self.command);
        let e_nz = outputs.nz - reference.nz;
        let e_ps = outputs.ps - reference.ps;
        let e_nyr = outputs.nyr - reference.nyr;

        let side_e = saturation_side(raw.elevator, cmd.elevator);
        if side_e == 0.0 || (-gains.k_long[2] * e_nz).signum() != side_e {
            integrators.nz += dt * e_nz;
        }
        let sides = [
            saturation_side(raw.aileron, cmd.aileron),
            saturation_side(raw.rudder, cmd.rudder),
        ];
        let pushes =
            |row: usize, col: usize, e: f64| (-gains.k_lat[row][col] * e).signum() == sides[row];
        let blocked =
            |col: usize, e: f64| (0..2).any(|row| sides[row] != 0.0 && pushes(row, col, e));
        if !blocked(3, e_ps) {
            integrators.ps += dt * e_ps;
        }
        if !blocked(4, e_nyr) {
            integrators.nyr += dt * e_nyr;
        }
    }
}

/// One inner-loop step: `inner_loop` followed by `integrate`.
#[allow(clippy::too_many_arguments)]
pub fn llc_command(
    state: &AircraftState,
    outputs: &LoopOutputs,
    reference: &ReferenceVector,
    gains: &GainSet,
    op: &OperatingPoint,
    integrators: &mut Integrators,
    dt: f64,
    limits: &Limits,
) -> CommandVector {
    let step = inner_loop(state, reference, gains, op, integrators, limits);
    step.integrate(outputs, reference, gains, integrators, dt);
    step.command
}
