//! Cascaded flight control: a PD waypoint autopilot feeding two decoupled
//! LQR inner loops with integral action.

pub mod autopilot;
pub mod command;
pub mod config;
pub mod llc;
pub mod lqr;

pub use autopilot::{
    autopilot_references, climb_rate, waypoint_guidance, wrap_angle, AutopilotGains,
    AutopilotOutput, AutopilotTarget, Guidance, WaypointManager, WaypointStatus,
};
pub use command::{CommandVector, ReferenceVector};
pub use config::{ControllerConfig, ControllerDesign, InnerLoopDesign};
pub use llc::{
    inner_loop, linearize, llc_command, loop_outputs, synthesize_gains, GainSet,
    GainSynthesisConfig, InnerLoopStep, Integrators, Linearization, LoopOutputs, LqrWeights,
    OperatingPoint,
};
