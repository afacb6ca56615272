//! Aircraft parameter data: mass, geometry, inertia, aerodynamic polynomial
//! coefficients, engine tables and envelope limits, loaded from JSON.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// The bundled F-16 data file.
pub const DEFAULT_PARAMS_JSON: &str = include_str!("../../data/f16.json");

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassData {
    pub weight_lbf: f64,
    pub g_ftps2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Geometry {
    pub wing_area_ft2: f64,
    pub span_ft: f64,
    pub chord_ft: f64,
    /// Centre of gravity, fraction of mean chord.
    pub xcg: f64,
    /// Moment reference point of the aerodynamic data, fraction of mean chord.
    pub xcg_ref: f64,
}

/// Inertia tensor entries in slug·ft²; `Ixy = Iyz = 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Inertia {
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixz: f64,
}

/// Coefficient arrays of the global polynomial model. The monomial set of
/// each array is fixed by [`aero_coefficients`](super::aero::aero_coefficients).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AeroData {
    pub cx0: [f64; 7],
    pub cxq: [f64; 5],
    pub cy0: [f64; 3],
    pub cyp: [f64; 4],
    pub cyr: [f64; 4],
    pub cz0: [f64; 6],
    pub czq: [f64; 5],
    pub cl0: [f64; 8],
    pub clp: [f64; 4],
    pub clr: [f64; 5],
    pub clda: [f64; 7],
    pub cldr: [f64; 7],
    pub cm0: [f64; 8],
    pub cmq: [f64; 6],
    pub cn0: [f64; 7],
    pub cnp: [f64; 5],
    pub cnr: [f64; 3],
    pub cnda: [f64; 10],
    pub cndr: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EngineLag {
    /// Power-dependent lag with afterburner hysteresis around 50 %.
    StevensLewis,
    /// First-order lag with a fixed time constant; commanded power is
    /// `100 * throttle`.
    Constant { time_constant_s: f64 },
}

/// Thrust tables indexed `[mach][altitude]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineData {
    pub altitudes_ft: Vec<f64>,
    pub machs: Vec<f64>,
    pub idle_lbf: Vec<Vec<f64>>,
    pub mil_lbf: Vec<Vec<f64>>,
    pub max_lbf: Vec<Vec<f64>>,
    pub lag: EngineLag,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Limits {
    pub alpha_min_deg: f64,
    pub alpha_max_deg: f64,
    pub beta_max_deg: f64,
    /// Distance from ±90° pitch at which the Euler singularity guard trips.
    pub theta_margin_deg: f64,
    pub throttle_min: f64,
    pub throttle_max: f64,
    pub elevator_max_deg: f64,
    pub aileron_max_deg: f64,
    pub rudder_max_deg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsFile {
    schema_version: u32,
    name: String,
    #[serde(default)]
    sources: serde_json::Value,
    mass: MassData,
    geometry: Geometry,
    inertia: Inertia,
    aero: AeroData,
    engine: EngineData,
    limits: Limits,
}

/// Derived ratios of the inertia tensor used by the rotational equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub gamma: f64,
}

pub fn inertia_coefficients(i: &Inertia) -> Result<InertiaCoefficients> {
    let gamma = i.ixx * i.izz - i.ixz * i.ixz;
    if !(gamma > 0.0) || !(i.iyy > 0.0) {
        return Err(Error::Parameter(format!(
            "inertia tensor not positive definite (Γ = {gamma}, Iyy = {})",
            i.iyy
        )));
    }
    Ok(InertiaCoefficients {
        c1: ((i.iyy - i.izz) * i.izz - i.ixz * i.ixz) / gamma,
        c2: i.ixz * (i.ixx - i.iyy + i.izz) / gamma,
        c3: i.izz / gamma,
        c4: i.ixz / gamma,
        c5: (i.izz - i.ixx) / i.iyy,
        c6: i.ixz / i.iyy,
        c7: 1.0 / i.iyy,
        c8: ((i.ixx - i.iyy) * i.ixx + i.ixz * i.ixz) / gamma,
        c9: i.ixx / gamma,
        gamma,
    })
}

/// Validated, immutable aircraft parameters. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct AircraftParams {
    pub name: String,
    pub mass_slug: f64,
    pub g: f64,
    pub geometry: Geometry,
    pub inertia: Inertia,
    pub coeffs: InertiaCoefficients,
    pub aero: AeroData,
    pub engine: EngineData,
    pub limits: Limits,
    raw_json: String,
}

impl AircraftParams {
    /// The bundled F-16 parameter set.
    pub fn f16() -> Self {
        Self::from_json_str(DEFAULT_PARAMS_JSON).expect("bundled parameter file is valid")
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: ParamsFile = serde_json::from_str(json).map_err(|source| Error::Json {
            path: "<parameters>".into(),
            source,
        })?;
        Self::from_file(file, json.to_owned())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: ParamsFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_file(file, text)
    }

    fn from_file(file: ParamsFile, raw_json: String) -> Result<Self> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Parameter(format!(
                "unsupported parameter schema version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let positive = [
            ("weight_lbf", file.mass.weight_lbf),
            ("g_ftps2", file.mass.g_ftps2),
            ("wing_area_ft2", file.geometry.wing_area_ft2),
            ("span_ft", file.geometry.span_ft),
            ("chord_ft", file.geometry.chord_ft),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if let EngineLag::Constant { time_constant_s } = file.engine.lag {
            if !(time_constant_s > 0.0) {
                return Err(Error::Parameter(format!(
                    "engine lag time constant must be positive, got {time_constant_s}"
                )));
            }
        }
        let e = &file.engine;
        let shape_ok = |t: &Vec<Vec<f64>>| {
            t.len() == e.machs.len() && t.iter().all(|row| row.len() == e.altitudes_ft.len())
        };
        if e.machs.len() < 2
            || e.altitudes_ft.len() < 2
            || !shape_ok(&e.idle_lbf)
            || !shape_ok(&e.mil_lbf)
            || !shape_ok(&e.max_lbf)
        {
            return Err(Error::Parameter(
                "engine tables must be [mach][altitude] with at least 2x2 entries".into(),
            ));
        }
        let l = &file.limits;
        if !(l.alpha_min_deg < l.alpha_max_deg
            && l.beta_max_deg > 0.0
            && l.throttle_min < l.throttle_max)
        {
            return Err(Error::Parameter(
                "inconsistent envelope/actuator limits".into(),
            ));
        }
        let coeffs = inertia_coefficients(&file.inertia)?;
        Ok(Self {
            name: file.name,
            mass_slug: file.mass.weight_lbf / file.mass.g_ftps2,
            g: file.mass.g_ftps2,
            geometry: file.geometry,
            inertia: file.inertia,
            coeffs,
            aero: file.aero,
            engine: file.engine,
            limits: file.limits,
            raw_json,
        })
    }

    /// The JSON text the parameters were loaded from.
    pub fn source_json(&self) -> &str {
        &self.raw_json
    }

    pub fn with_engine_lag(mut self, lag: EngineLag) -> Self {
        self.engine.lag = lag;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_inertia_coefficients() {
        let i = Inertia {
            ixx: 2.0,
            iyy: 5.0,
            izz: 7.0,
            ixz: 0.0,
        };
        let c = inertia_coefficients(&i).unwrap();
        assert_eq!(c.gamma, 14.0);
        assert_eq!((c.c2, c.c4, c.c6), (0.0, 0.0, 0.0));
        assert_relative_eq!(c.c3, 0.5, epsilon = 1e-15);
        assert_relative_eq!(c.c7, 0.2, epsilon = 1e-15);
        assert_relative_eq!(c.c9, 1.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn f16_coefficients_match_tensor_inverse() {
        // The rate equations are I⁻¹(M − ω×Iω); the C-coefficients must
        // reproduce I⁻¹ exactly for the moment terms.
        let p = AircraftParams::f16();
        let i = p.inertia;
        let c = p.coeffs;
        let det = i.iyy * c.gamma;
        // I⁻¹ for [[ixx,0,-ixz],[0,iyy,0],[-ixz,0,izz]]
        let inv_xx = i.iyy * i.izz / det;
        let inv_xz = i.iyy * i.ixz / det;
        let inv_zz = i.ixx * i.iyy / det;
        assert_relative_eq!(c.c3, inv_xx, max_relative = 1e-12);
        assert_relative_eq!(c.c4, inv_xz, max_relative = 1e-12);
        assert_relative_eq!(c.c9, inv_zz, max_relative = 1e-12);
        assert_relative_eq!(c.c7, 1.0 / i.iyy, max_relative = 1e-12);
    }

    #[test]
    fn f16_coefficients_reference_values() {
        // Hand evaluation for Ixx=9496, Iyy=55814, Izz=63100, Ixz=982.
        let c = AircraftParams::f16().coeffs;
        let gamma = 9496.0 * 63100.0 - 982.0f64 * 982.0;
        assert_eq!(c.gamma, gamma);
        assert_relative_eq!(
            c.c1,
            ((55814.0 - 63100.0) * 63100.0 - 982.0 * 982.0) / gamma,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            c.c2,
            982.0 * (9496.0 - 55814.0 + 63100.0) / gamma,
            max_relative = 1e-12
        );
        assert_relative_eq!(c.c5, (63100.0 - 9496.0) / 55814.0, max_relative = 1e-12);
        assert_relative_eq!(c.c6, 982.0 / 55814.0, max_relative = 1e-12);
        assert_relative_eq!(
            c.c8,
            ((9496.0 - 55814.0) * 9496.0 + 982.0 * 982.0) / gamma,
            max_relative = 1e-12
        );
        assert_relative_eq!(c.c1, -0.770_12, epsilon = 1e-5);
        assert_relative_eq!(c.c8, -0.733_61, epsilon = 1e-5);
    }

    #[test]
    fn singular_inertia_rejected() {
        let i = Inertia {
            ixx: 1.0,
            iyy: 1.0,
            izz: 1.0,
            ixz: 1.0,
        };
        assert!(matches!(inertia_coefficients(&i), Err(Error::Parameter(_))));
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let json =
            DEFAULT_PARAMS_JSON.replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
        assert!(AircraftParams::from_json_str(&json).is_err());
    }

    #[test]
    fn mass_from_weight() {
        let p = AircraftParams::f16();
        assert_relative_eq!(p.mass_slug, 20500.0 / 32.17, epsilon = 1e-12);
    }
}
