//! The thirteen-state nonlinear aircraft plant.

pub mod aero;
pub mod atmosphere;
pub mod engine;
pub mod eom;
pub mod params;
pub mod state;
pub mod trim;

pub use aero::{aero_coefficients, AeroCoefficients, AeroInput};
pub use eom::{
    body_to_earth, derivative_from_loads, forces_moments, in_envelope, load_factors,
    rk4_from_slope, rk4_step, rk4_with, state_derivative, DynamicsFault, ForcesMoments,
    LoadFactors,
};
pub use params::{inertia_coefficients, AircraftParams, DEFAULT_PARAMS_JSON, EngineLag, InertiaCoefficients};
pub use state::AircraftState;
pub use trim::{trim, trim_from, TrimGuess, TrimPoint};
