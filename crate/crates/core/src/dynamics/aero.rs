//! Global polynomial aerodynamic model of the F-16 in the subsonic regime.
//!
//! Angles and deflections are in radians. Body rates are non-dimensionalised
//! internally as `p·b/2V`, `q·c/2V`, `r·b/2V`.

use super::params::{AeroData, AircraftParams};

/// Total body-axis force and moment coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AeroCoefficients {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub cl: f64,
    pub cm: f64,
    pub cn: f64,
}

/// Flow angles, body rates and surface deflections entering the model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AeroInput {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub elevator: f64,
    pub aileron: f64,
    pub rudder: f64,
    pub vt: f64,
}

#[inline]
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Evaluates the six total coefficients. Envelope checks are the caller's
/// job (see [`Limits`](super::params::Limits)); the polynomials themselves
/// are defined everywhere.
pub fn aero_coefficients(input: &AeroInput, params: &AircraftParams) -> AeroCoefficients {
    let g = &params.geometry;
    let k = &params.aero;
    let AeroInput {
        alpha: a,
        beta: b,
        p,
        q,
        r,
        elevator: de,
        aileron: da,
        rudder: dr,
        vt,
    } = *input;

    let two_v = 2.0 * vt;
    let phat = p * g.span_ft / two_v;
    let qhat = q * g.chord_ft / two_v;
    let rhat = r * g.span_ft / two_v;

    let a2 = a * a;
    let a3 = a2 * a;
    let b2 = b * b;

    let c = &k.cx0;
    let cx0 = c[0] + c[1] * a + c[2] * de * de + c[3] * de + c[4] * a * de + c[5] * a2 + c[6] * a3;
    let cxq = poly(&k.cxq, a);

    let c = &k.cy0;
    let cy0 = c[0] * b + c[1] * da + c[2] * dr;
    let cyp = poly(&k.cyp, a);
    let cyr = poly(&k.cyr, a);

    let c = &k.cz0;
    let cz0 = poly(&c[..5], a) * (1.0 - b2) + c[5] * de;
    let czq = poly(&k.czq, a);

    let c = &k.cl0;
    let cl0 = c[0] * b
        + c[1] * a * b
        + c[2] * a2 * b
        + c[3] * b2
        + c[4] * a * b2
        + c[5] * a3 * b
        + c[6] * a3 * a * b
        + c[7] * a2 * b2;
    let clp = poly(&k.clp, a);
    let clr = poly(&k.clr, a);
    let c = &k.clda;
    let clda = c[0] + c[1] * a + c[2] * b + c[3] * a2 + c[4] * a * b + c[5] * a2 * b + c[6] * a3;
    let c = &k.cldr;
    let cldr =
        c[0] + c[1] * a + c[2] * b + c[3] * a * b + c[4] * a2 * b + c[5] * a3 * b + c[6] * b2;

    let c = &k.cm0;
    let cm0 = c[0]
        + c[1] * a
        + c[2] * de
        + c[3] * a * de
        + c[4] * de * de
        + c[5] * a2 * de
        + c[6] * de * de * de
        + c[7] * a * de * de;
    let cmq = poly(&k.cmq, a);

    let c = &k.cn0;
    let cn0 = c[0] * b
        + c[1] * a * b
        + c[2] * b2
        + c[3] * a * b2
        + c[4] * a2 * b
        + c[5] * a2 * b2
        + c[6] * a3 * b;
    let cnp = poly(&k.cnp, a);
    let cnr = poly(&k.cnr, a);
    let c = &k.cnda;
    let cnda = c[0]
        + c[1] * a
        + c[2] * b
        + c[3] * a * b
        + c[4] * a2 * b
        + c[5] * a3 * b
        + c[6] * a2
        + c[7] * a3
        + c[8] * b2 * b
        + c[9] * a * b2 * b;
    let c = &k.cndr;
    let cndr = c[0] + c[1] * a + c[2] * b + c[3] * a * b + c[4] * a2 * b + c[5] * a2;

    let cx = cx0 + cxq * qhat;
    let cy = cy0 + cyp * phat + cyr * rhat;
    let cz = cz0 + czq * qhat;
    let cg_shift = g.xcg_ref - g.xcg;
    let cl = cl0 + clp * phat + clr * rhat + clda * da + cldr * dr;
    let cm = cm0 + cmq * qhat + cz * cg_shift;
    let cn = cn0 + cnp * phat + cnr * rhat + cnda * da + cndr * dr
        - cy * cg_shift * (g.chord_ft / g.span_ft);

    AeroCoefficients {
        cx,
        cy,
        cz,
        cl,
        cm,
        cn,
    }
}

/// The constant terms of the longitudinal polynomials, i.e. the
/// coefficients at zero angles, rates and deflections.
pub fn zero_condition(aero: &AeroData) -> (f64, f64, f64) {
    (aero.cx0[0], aero.cz0[0], aero.cm0[0])
}
