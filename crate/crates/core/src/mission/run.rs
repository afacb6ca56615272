use super::scenario::ScenarioConfig;
use super::trajectory::{Trajectory, TrajectoryRow};
use super::{FailureMode, RunConfig, RunRecord};
use crate::channel::{
    apply_link_policy, make_mask, sample_link_schedule, DelayLine, LinkSchedule, LinkState,
    LossMode, ThrottleOnLoss,
};
use crate::control::{
    autopilot_references, inner_loop, loop_outputs, AutopilotTarget, CommandVector,
    ControllerConfig, ControllerDesign, Integrators, LoopOutputs, ReferenceVector, WaypointManager,
    WaypointStatus,
};
use crate::dynamics::{
    derivative_from_loads, forces_moments, load_factors, rk4_from_slope, state_derivative, trim,
    AircraftParams, AircraftState, TrimPoint,
};
use crate::error::{Error, Result};

/// How the link is realised for a run.
#[derive(Debug, Clone, Default)]
pub enum LinkOverride {
    /// Sample a schedule from the run's `p_a` and seed.
    #[default]
    Sampled,
    /// Use this schedule instead of sampling one; latency still applies.
    Schedule(LinkSchedule),
    /// No channel at all: the remote command is applied directly.
    Direct,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub trajectory: Option<Trajectory>,
}

/// A scenario with its trim point and controller design, ready to run.
/// Immutable; one instance can serve many concurrent runs.
#[derive(Debug, Clone)]
pub struct Mission {
    scenario: ScenarioConfig,
    params: AircraftParams,
    trim: TrimPoint,
    design: ControllerDesign,
    initial_state: AircraftState,
    waypoints: Vec<[f64; 3]>,
}

impl Mission {
    pub fn new(
        scenario: ScenarioConfig,
        params: AircraftParams,
        controller: &ControllerConfig,
    ) -> Result<Self> {
        scenario.validate()?;
        let ic = scenario.initial;
        let trim = trim(ic.vt_ftps, ic.altitude_ft, &params)?;
        let design = ControllerDesign::new(&trim, &params, controller)?;
        let initial_state = AircraftState {
            psi: crate::control::wrap_angle(ic.heading_deg.to_radians()),
            x_e: ic.north_ft,
            y_e: ic.east_ft,
            ..trim.state
        };
        let waypoints = scenario.waypoints_ned();
        Ok(Mission {
            scenario,
            params,
            trim,
            design,
            initial_state,
            waypoints,
        })
    }

    /// Bundled F-16 parameters and default controller.
    pub fn with_defaults(scenario: ScenarioConfig) -> Result<Self> {
        Self::new(
            scenario,
            AircraftParams::f16(),
            &ControllerConfig::default(),
        )
    }

    pub fn scenario(&self) -> &ScenarioConfig {
        &self.scenario
    }

    pub fn params(&self) -> &AircraftParams {
        &self.params
    }

    pub fn trim(&self) -> &TrimPoint {
        &self.trim
    }

    pub fn design(&self) -> &ControllerDesign {
        &self.design
    }

    pub fn initial_state(&self) -> &AircraftState {
        &self.initial_state
    }

    pub fn run(&self, run: &RunConfig) -> Result<RunRecord> {
        Ok(self.run_detailed(run, LinkOverride::Sampled, false)?.record)
    }

    pub fn run_with_trajectory(&self, run: &RunConfig) -> Result<RunOutput> {
        self.run_detailed(run, LinkOverride::Sampled, true)
    }

    /// Runs one mission. Errors are configuration problems found before the
    /// loop starts; everything that goes wrong in flight ends up as the
    /// record's failure mode.
    pub fn run_detailed(
        &self,
        run: &RunConfig,
        link: LinkOverride,
        capture: bool,
    ) -> Result<RunOutput> {
        run.validate()?;
        let dt = self.scenario.dt_s;
        let n_max = self.scenario.max_steps();
        let horizon = (n_max + 1) as f64 * dt;

        let (mask, mut delay) = match link {
            LinkOverride::Direct => (None, None),
            LinkOverride::Sampled => {
                let schedule = sample_link_schedule(run.p_a, horizon, run.seed)?;
                (
                    Some(make_mask(&schedule, dt, n_max + 1)?),
                    Some(self.delay_line(run)?),
                )
            }
            LinkOverride::Schedule(schedule) => {
                if schedule.horizon() < n_max as f64 * dt {
                    return Err(Error::Config(format!(
                        "injected schedule horizon {} is shorter than the time limit",
                        schedule.horizon()
                    )));
                }
                (
                    Some(make_mask(&schedule, dt, n_max + 1)?),
                    Some(self.delay_line(run)?),
                )
            }
        };

        let params = &self.params;
        let op = &self.design.operating_point;
        let gains = &self.design.gains;
        let limits = &params.limits;
        let r_threshold = self.scenario.r_threshold_ft;

        let mut trajectory = capture.then(|| Trajectory::with_capacity(dt, n_max + 1));
        let mut state = self.initial_state;
        let mut applied = self.trim.command;
        let mut manager = WaypointManager::new(state.psi);
        let mut remote = Integrators::default();
        let mut onboard = Integrators::default();
        let mut was_on = true;
        let mut throttle_hold = applied.throttle;
        let mut last_reference = ReferenceVector::default();

        let finish = |outcome: std::result::Result<f64, FailureMode>,
                      reached: usize,
                      trajectory: Option<Trajectory>| {
            Ok(RunOutput {
                record: RunRecord::new(run, outcome, reached),
                trajectory,
            })
        };

        for k in 0..=n_max {
            let t = self.scenario.time_of(k);
            let link_on = mask.as_ref().is_none_or(|m| m[k]);
            // Row for a step on which the run ends, measured with the last command.
            let final_row = |index: usize| match forces_moments(&state, &applied, params) {
                Ok(fm) => {
                    let loads = load_factors(&fm, params);
                    let measured = LoopOutputs {
                        nz: loads.nz,
                        ..loop_outputs(&state, &loads, op)
                    };
                    TrajectoryRow::new(
                        t,
                        &state,
                        &applied,
                        &measured,
                        last_reference,
                        link_on,
                        index,
                    )
                }
                Err(_) => TrajectoryRow::unmeasured(t, &state, &applied, last_reference, link_on, index),
            };

            if state.altitude() <= 0.0 {
                if let Some(tr) = trajectory.as_mut() {
                    tr.push(final_row(manager.index()));
                }
                return finish(Err(FailureMode::GroundImpact), manager.index(), trajectory);
            }

            let status = manager.update(&state, &self.waypoints, r_threshold);
            let (index, g) = match status {
                WaypointStatus::Done { .. } => {
                    if let Some(tr) = trajectory.as_mut() {
                        tr.push(final_row(manager.index()));
                    }
                    return finish(Ok(t), manager.index(), trajectory);
                }
                WaypointStatus::Active { index, guidance } => (index, guidance),
            };
            if k == n_max {
                if let Some(tr) = trajectory.as_mut() {
                    tr.push(final_row(manager.index()));
                }
                return finish(Err(FailureMode::Timeout), manager.index(), trajectory);
            }

            // Remote station: autopilot and inner loops on the observed state.
            let target = AutopilotTarget {
                psi_cmd: g.psi_cmd,
                h_cmd: -self.waypoints[index][2],
                vt_cmd: self.scenario.initial.vt_ftps,
                throttle_trim: self.trim.command.throttle,
            };
            let ap = autopilot_references(&state, &target, &self.design.autopilot);
            let remote_step = inner_loop(&state, &ap.reference, gains, op, &remote, limits);
            let delayed = match delay.as_mut() {
                Some(line) => line.delayed(remote_step.command),
                None => remote_step.command,
            };

            if !link_on && was_on {
                onboard = Integrators::default();
                throttle_hold = match run.loss_policy.throttle {
                    ThrottleOnLoss::HoldLast => applied.throttle,
                    ThrottleOnLoss::Zero => 0.0,
                };
            }
            let level = ReferenceVector::level(throttle_hold);
            let failsafe_active = !link_on && run.loss_policy.mode == LossMode::FailsafeReference;
            let failsafe_step =
                failsafe_active.then(|| inner_loop(&state, &level, gains, op, &onboard, limits));
            let failsafe = failsafe_step.map_or(CommandVector::ZERO, |s| s.command);
            let link_state = if link_on {
                LinkState::On
            } else {
                LinkState::Off
            };
            let next = apply_link_policy(link_state, delayed, failsafe, run.loss_policy);
            let reference = match (link_on, run.loss_policy.mode) {
                (true, _) => ap.reference,
                (false, LossMode::FailsafeReference) => level,
                (false, LossMode::ZeroControl) => ReferenceVector::default(),
            };
            was_on = link_on;
            applied = next;
            last_reference = reference;

            // Sensors read the loads under the command now applied; the same
            // evaluation is the first RK4 slope.
            let fm = match forces_moments(&state, &applied, params) {
                Ok(fm) => fm,
                Err(fault) => {
                    if let Some(tr) = trajectory.as_mut() {
                        tr.push(TrajectoryRow::unmeasured(
                            t,
                            &state,
                            &applied,
                            reference,
                            link_on,
                            manager.index(),
                        ));
                    }
                    return finish(Err(fault.into()), manager.index(), trajectory);
                }
            };
            let loads = load_factors(&fm, params);
            let outputs = loop_outputs(&state, &loads, op);
            // No telemetry reaches the station while the link is down.
            if link_on {
                remote_step.integrate(&outputs, &ap.reference, gains, &mut remote, dt);
            }
            if let Some(step) = failsafe_step {
                step.integrate(&outputs, &level, gains, &mut onboard, dt);
            }
            if let Some(tr) = trajectory.as_mut() {
                let measured = LoopOutputs {
                    nz: loads.nz,
                    ..outputs
                };
                tr.push(TrajectoryRow::new(
                    t,
                    &state,
                    &applied,
                    &measured,
                    reference,
                    link_on,
                    manager.index(),
                ));
            }

            let k1 = derivative_from_loads(&state, &applied, &fm, params);
            state = match rk4_from_slope(&state, k1, dt, |s| state_derivative(s, &applied, params))
            {
                Ok(s) => s,
                Err(fault) => return finish(Err(fault.into()), manager.index(), trajectory),
            };
        }
        unreachable!("loop returns at k == n_max")
    }

    fn delay_line(&self, run: &RunConfig) -> Result<DelayLine> {
        DelayLine::for_latency(run.epsilon, self.scenario.dt_s, self.trim.command)
    }
}
