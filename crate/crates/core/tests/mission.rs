use rpas_core::channel::{LinkSchedule, LossPolicy};
use rpas_core::control::{CommandVector, ReferenceVector};
use rpas_core::mission::{FailureMode, LinkOverride, Mission, RunConfig, ScenarioConfig};

fn s2() -> Mission {
    Mission::with_defaults(ScenarioConfig::scenario2()).unwrap()
}

#[test]
fn direct_link_equals_perfect_channel() {
    let m = s2();
    let direct = m.run_detailed(&RunConfig::ideal(), LinkOverride::Direct, true).unwrap();
    let sampled = m.run_with_trajectory(&RunConfig::ideal()).unwrap();
    assert_eq!(direct.record, sampled.record);
    assert_eq!(direct.trajectory, sampled.trajectory);
    assert!(direct.record.success);
}

#[test]
fn repeated_runs_are_identical() {
    let m = s2();
    let run = RunConfig {
        p_a: 0.8,
        epsilon: 0.04,
        seed: 1234,
        ..RunConfig::ideal()
    };
    let a = m.run_with_trajectory(&run).unwrap();
    let b = m.run_with_trajectory(&run).unwrap();
    assert_eq!(a.record, b.record);
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(m.run(&run).unwrap(), a.record);
}

#[test]
fn tiny_time_limit_times_out() {
    let mut scenario = ScenarioConfig::scenario2();
    scenario.time_limit_s = 0.001;
    let m = Mission::with_defaults(scenario).unwrap();
    let out = m.run_with_trajectory(&RunConfig::ideal()).unwrap();
    assert!(!out.record.success);
    assert_eq!(out.record.failure_mode, Some(FailureMode::Timeout));
    assert_eq!(out.record.completion_time, None);
    assert_eq!(out.record.waypoints_reached, 0);
    let rows = out.trajectory.unwrap().rows;
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].time_s, rows[1].time_s), (0.0, 0.001));
}

#[test]
fn successful_trajectory_has_one_row_per_step() {
    let out = s2().run_with_trajectory(&RunConfig::ideal()).unwrap();
    let t = out.record.completion_time.unwrap();
    let traj = out.trajectory.unwrap();
    assert_eq!(traj.len(), (t / traj.dt).round() as usize + 1);
    assert_eq!(traj.duration(), t);
    assert_eq!(out.record.waypoints_reached, 3);
    let indices: Vec<usize> = traj.rows.iter().map(|r| r.waypoint_index).collect();
    assert!(indices.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
}

#[test]
fn latency_holds_trim_command_during_warmup() {
    let m = s2();
    let run = RunConfig {
        epsilon: 0.05,
        ..RunConfig::ideal()
    };
    let rows = m.run_with_trajectory(&run).unwrap().trajectory.unwrap().rows;
    let trim = m.trim().command;
    // Round trip of 0.1 s is 100 steps at dt = 1 ms.
    assert!(rows[..100].iter().all(|r| r.command == trim));
    let direct = m.run_detailed(&RunConfig::ideal(), LinkOverride::Direct, true).unwrap();
    let undelayed = direct.trajectory.unwrap().rows;
    assert_ne!(rows[150].command, undelayed[150].command);
}

fn lost_after(seconds: f64) -> LinkSchedule {
    LinkSchedule::from_durations(&[seconds, 1e6], 1e3).unwrap()
}

#[test]
fn permanent_loss_flies_level_references() {
    let m = s2();
    let out = m
        .run_detailed(&RunConfig::ideal(), LinkOverride::Schedule(lost_after(0.5)), true)
        .unwrap();
    let rows = out.trajectory.unwrap().rows;
    let lost: Vec<_> = rows.iter().filter(|r| r.time_s >= 0.5).collect();
    assert!(!lost.is_empty());
    let throttle = lost[0].reference.throttle;
    for r in &lost {
        assert!(!r.link_on);
        assert_eq!(r.reference, ReferenceVector::level(throttle));
    }
    assert!(rows.iter().filter(|r| r.time_s < 0.5).all(|r| r.link_on));
    assert!(!out.record.success);
}

#[test]
fn zero_control_loss_cuts_every_channel() {
    let m = s2();
    let run = RunConfig {
        loss_policy: LossPolicy::ZERO_CONTROL,
        ..RunConfig::ideal()
    };
    let out = m.run_detailed(&run, LinkOverride::Schedule(lost_after(0.5)), true).unwrap();
    let rows = out.trajectory.unwrap().rows;
    let lost: Vec<_> = rows.iter().filter(|r| r.time_s >= 0.5).collect();
    assert!(lost.iter().all(|r| r.command == CommandVector::ZERO));
    assert!(lost.iter().all(|r| r.reference == ReferenceVector::default()));
    assert!(!out.record.success);
    assert!(out.record.failure_mode.is_some());
}

#[test]
fn short_injected_schedule_is_rejected() {
    let short = LinkSchedule::from_durations(&[10.0], 10.0).unwrap();
    assert!(s2().run_detailed(&RunConfig::ideal(), LinkOverride::Schedule(short), false).is_err());
}

#[test]
fn invalid_run_configs_are_errors() {
    let m = s2();
    for (p_a, epsilon) in [(0.0, 0.0), (1.1, 0.0), (0.9, -0.01), (0.9, f64::NAN)] {
        let run = RunConfig {
            p_a,
            epsilon,
            ..RunConfig::ideal()
        };
        assert!(m.run(&run).is_err(), "p_a={p_a} eps={epsilon}");
    }
}

#[test]
fn trajectory_csv_has_header_and_one_line_per_row() {
    let out = s2().run_with_trajectory(&RunConfig::ideal()).unwrap();
    let traj = out.trajectory.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    traj.export(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), rpas_core::mission::TRAJECTORY_HEADER.join(","));
    assert_eq!(lines.count(), traj.len());
}
