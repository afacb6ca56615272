//! Air data from a tropospheric standard-atmosphere fit.

/// Sea-level density, slug/ft³.
pub const RHO_SEA_LEVEL: f64 = 2.377e-3;
const TEMP_SEA_LEVEL_R: f64 = 519.0;
const TEMP_STRATOSPHERE_R: f64 = 390.0;
const TROPOPAUSE_FT: f64 = 35_000.0;
const LAPSE_PER_FT: f64 = 0.703e-5;
const DENSITY_EXPONENT: f64 = 4.14;
const GAMMA_AIR: f64 = 1.4;
const R_AIR: f64 = 1716.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirData {
    /// slug/ft³
    pub density: f64,
    /// °R
    pub temperature: f64,
    pub mach: f64,
    /// lbf/ft²
    pub dynamic_pressure: f64,
}

pub fn density(alt_ft: f64) -> f64 {
    RHO_SEA_LEVEL * (1.0 - LAPSE_PER_FT * alt_ft).powf(DENSITY_EXPONENT)
}

pub fn temperature(alt_ft: f64) -> f64 {
    if alt_ft >= TROPOPAUSE_FT {
        TEMP_STRATOSPHERE_R
    } else {
        TEMP_SEA_LEVEL_R * (1.0 - LAPSE_PER_FT * alt_ft)
    }
}

pub fn air_data(vt: f64, alt_ft: f64) -> AirData {
    let density = density(alt_ft);
    let temperature = temperature(alt_ft);
    AirData {
        density,
        temperature,
        mach: vt / (GAMMA_AIR * R_AIR * temperature).sqrt(),
        dynamic_pressure: 0.5 * density * vt * vt,
    }
}
