//! Required Communication Performance metrics for a two-state on/off link.
//!
//! The link alternates between an *on* state (service usable) and an *off*
//! state. Sojourn times are exponential: on-durations with rate `lambda_off`,
//! off-durations with rate `lambda_on`. Everything here is a closed form of
//! that continuous-time Markov chain, plus a quadrature route for the
//! communicability metric that does not share any algebra with the closed form.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

const UNIT_SUM_TOL: f64 = 1e-12;

/// Transition rates of the on/off chain, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcpRates {
    /// off -> on.
    pub lambda_on: f64,
    /// on -> off.
    pub lambda_off: f64,
    /// When set, `lambda_on + lambda_off == 1` and availability equals `lambda_on`.
    #[serde(default)]
    pub unit_sum: bool,
}

impl RcpRates {
    pub fn new(lambda_on: f64, lambda_off: f64) -> Result<Self> {
        let rates = Self {
            lambda_on,
            lambda_off,
            unit_sum: false,
        };
        rates.validate()?;
        Ok(rates)
    }

    /// Rates under the unit-sum convention: `lambda_on = p_a`, `lambda_off = 1 - p_a`.
    pub fn from_availability(p_a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_a) {
            return Err(domain(format!("availability {p_a} outside [0, 1]")));
        }
        let rates = Self {
            lambda_on: p_a,
            lambda_off: 1.0 - p_a,
            unit_sum: true,
        };
        rates.validate()?;
        Ok(rates)
    }

    pub fn validate(&self) -> Result<()> {
        let (on, off) = (self.lambda_on, self.lambda_off);
        if !(on.is_finite() && off.is_finite()) || on < 0.0 || off < 0.0 {
            return Err(domain(format!(
                "rates must be finite and non-negative (on={on}, off={off})"
            )));
        }
        if on + off == 0.0 {
            return Err(domain("lambda_on and lambda_off are both zero"));
        }
        if self.unit_sum && ((on + off) - 1.0).abs() > UNIT_SUM_TOL {
            return Err(domain(format!(
                "unit-sum convention violated: {on} + {off} != 1"
            )));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.lambda_on + self.lambda_off
    }

    /// Generator matrix of the chain, rows/cols ordered (off, on).
    pub fn generator(&self) -> [[f64; 2]; 2] {
        [
            [-self.lambda_on, self.lambda_on],
            [self.lambda_off, -self.lambda_off],
        ]
    }

    /// Mean on-duration, `E[T_on] = 1 / lambda_off` (infinite if the link never drops).
    pub fn mean_on(&self) -> f64 {
        1.0 / self.lambda_off
    }

    /// Mean off-duration, `E[T_off] = 1 / lambda_on`.
    pub fn mean_off(&self) -> f64 {
        1.0 / self.lambda_on
    }
}

/// A message to be carried by the link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MessageSpec {
    pub size_bits: f64,
    pub bitrate: f64,
    pub tau_msg: f64,
}

impl MessageSpec {
    pub fn new(size_bits: f64, bitrate: f64) -> Result<Self> {
        let tau_msg = message_duration(size_bits, bitrate)?;
        Ok(Self {
            size_bits,
            bitrate,
            tau_msg,
        })
    }

    /// Seven f64 control values (56 bytes) over VHF ACARS at 2.4 kbit/s.
    pub fn acars_control_frame() -> Self {
        Self::new(448.0, 2400.0).expect("constant message spec")
    }
}

/// Transmission time of a message, `size_bits / bitrate`.
pub fn message_duration(size_bits: f64, bitrate: f64) -> Result<f64> {
    if !(size_bits.is_finite() && size_bits > 0.0) {
        return Err(domain(format!(
            "message size must be positive, got {size_bits}"
        )));
    }
    if !(bitrate.is_finite() && bitrate > 0.0) {
        return Err(domain(format!("bitrate must be positive, got {bitrate}")));
    }
    Ok(size_bits / bitrate)
}

/// Probability of being on at time `t`, having started on at `t = 0`.
pub fn availability_at(rates: &RcpRates, t: f64) -> Result<f64> {
    rates.validate()?;
    if !(t >= 0.0) {
        return Err(domain(format!("time must be non-negative, got {t}")));
    }
    let total = rates.total();
    let steady = rates.lambda_on / total;
    Ok((1.0 - steady) * (-total * t).exp() + steady)
}

/// Long-run fraction of time spent on, `lambda_on / (lambda_on + lambda_off)`.
pub fn steady_state_availability(rates: &RcpRates) -> Result<f64> {
    rates.validate()?;
    Ok(rates.lambda_on / rates.total())
}

/// Probability that an available link stays available for `tau` seconds.
pub fn continuity(rates: &RcpRates, tau: f64) -> Result<f64> {
    rates.validate()?;
    if !(tau >= 0.0) {
        return Err(domain(format!("duration must be non-negative, got {tau}")));
    }
    Ok((-rates.lambda_off * tau).exp())
}

fn check_availability(p_a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_a) {
        return Err(domain(format!("availability {p_a} outside [0, 1]")));
    }
    Ok(())
}

fn check_durations(tau_msg: f64, epsilon: f64) -> Result<()> {
    if !(tau_msg >= 0.0 && tau_msg.is_finite()) {
        return Err(domain(format!(
            "message duration must be non-negative, got {tau_msg}"
        )));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(domain(format!(
            "latency must be non-negative, got {epsilon}"
        )));
    }
    Ok(())
}

/// Communicability: probability that a message of duration `tau_msg` sent at
/// a random instant with one-way latency `epsilon` gets through.
///
/// `P_A * exp(-(1 - P_A) * (tau_msg + epsilon))`.
pub fn communicability(p_a: f64, tau_msg: f64, epsilon: f64) -> Result<f64> {
    check_availability(p_a)?;
    check_durations(tau_msg, epsilon)?;
    Ok(p_a * (-(1.0 - p_a) * (tau_msg + epsilon)).exp())
}

/// Same as [`communicability`], taking a [`MessageSpec`].
pub fn communicability_for(p_a: f64, msg: &MessageSpec, epsilon: f64) -> Result<f64> {
    communicability(p_a, msg.tau_msg, epsilon)
}

/// Communicability expressed with explicit rates under the unit-sum
/// convention: `lambda_on * exp(-lambda_off * (tau_msg + epsilon))`.
pub fn communicability_from_rates(rates: &RcpRates, tau_msg: f64, epsilon: f64) -> Result<f64> {
    rates.validate()?;
    if !rates.unit_sum {
        return Err(domain(
            "rate form of communicability requires the unit-sum convention",
        ));
    }
    check_durations(tau_msg, epsilon)?;
    Ok(rates.lambda_on * (-rates.lambda_off * (tau_msg + epsilon)).exp())
}

/// Communicability evaluated from its defining integral ratio,
///
/// ```text
/// P_A * ∫_{a}^{∞} (τ - a) f(τ) dτ / ∫_0^∞ τ f(τ) dτ,   a = tau_msg + epsilon,
/// f(τ) = (1 - P_A) exp(-(1 - P_A) τ),
/// ```
///
/// by adaptive Simpson quadrature on `[0, H]`, `H = 50 / (1 - P_A)`, where the
/// neglected tail mass is below `e^-50`.
pub fn communicability_numeric_oracle(p_a: f64, tau_msg: f64, epsilon: f64) -> Result<f64> {
    check_availability(p_a)?;
    check_durations(tau_msg, epsilon)?;
    let rate = 1.0 - p_a;
    if rate == 0.0 {
        // Degenerate density: the link never drops, every message succeeds.
        return Ok(p_a);
    }
    let offset = tau_msg + epsilon;
    let horizon = 50.0 / rate + offset;
    let density = |tau: f64| rate * (-rate * tau).exp();

    let denominator = integrate(|tau| tau * density(tau), 0.0, horizon)?;
    let numerator = integrate(|tau| (tau - offset) * density(tau), offset, horizon)?;
    Ok(p_a * numerator / denominator)
}

const QUAD_TOL: f64 = 1e-13;
const QUAD_MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]`, composed over unit-mass panels so the
/// recursion starts on an already well-resolved grid.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let panels = 64usize;
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let (flo, fhi) = (f(lo), f(hi));
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson(
            &f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            QUAD_TOL / panels as f64,
            QUAD_MAX_DEPTH,
        )?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "quadrature did not converge on [{a}, {b}] (error estimate {delta:.3e})"
        )));
    }
    Ok(simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}
