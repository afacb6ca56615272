//! Reliability laboratory for remotely piloted aircraft.
//!
//! The crate couples a six-degree-of-freedom F-16 plant and a cascaded
//! autopilot/LQR controller with a stochastic command link (on/off chain
//! plus round-trip latency), then sweeps link availability and latency in a
//! deterministic Monte Carlo engine to build mission-success envelopes.
//!
//! Modules, bottom-up:
//!
//! - [`rcp`]: availability, continuity and communicability closed forms.
//! - [`channel`]: link schedules, masks, the delay line and loss policy.
//! - [`dynamics`]: aircraft parameters, aerodynamics, equations of motion, trim.
//! - [`control`]: waypoint guidance, autopilot, LQR inner loops, gain synthesis.
//! - [`mission`]: single closed-loop mission runs and trajectory export.
//! - [`montecarlo`]: parameter sweeps and their aggregation.

pub mod channel;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod mission;
pub mod montecarlo;
pub mod rcp;

pub use error::{Error, Result};
