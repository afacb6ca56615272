//! Stochastic realisation of the command-and-control link: on/off schedules
//! sampled from the two-state chain, their discretised masks, the round-trip
//! delay line, and the policy that decides what the aircraft flies with when
//! the link is down.

use crate::control::CommandVector;
use crate::error::{domain, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkState {
    Off = 0,
    On = 1,
}

impl LinkState {
    pub fn is_on(self) -> bool {
        self == LinkState::On
    }

    fn flipped(self) -> Self {
        match self {
            LinkState::On => LinkState::Off,
            LinkState::Off => LinkState::On,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkInterval {
    pub state: LinkState,
    pub duration: f64,
}

/// Alternating on/off intervals covering `[0, horizon]`, starting on.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSchedule {
    intervals: Vec<LinkInterval>,
    starts: Vec<f64>,
    horizon: f64,
    seed: u64,
}

impl LinkSchedule {
    /// Builds a schedule from explicit interval durations, the first one on.
    pub fn from_durations(durations: &[f64], horizon: f64) -> Result<Self> {
        if durations.is_empty() {
            return Err(domain("schedule needs at least one interval"));
        }
        let mut state = LinkState::On;
        let intervals = durations
            .iter()
            .map(|&duration| {
                let iv = LinkInterval { state, duration };
                state = state.flipped();
                iv
            })
            .collect();
        Self::from_intervals(intervals, horizon, 0)
    }

    fn from_intervals(intervals: Vec<LinkInterval>, horizon: f64, seed: u64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain(format!("horizon must be positive, got {horizon}")));
        }
        let mut starts = Vec::with_capacity(intervals.len());
        let mut t = 0.0;
        let mut expected = LinkState::On;
        for iv in &intervals {
            if !(iv.duration > 0.0) {
                return Err(domain(format!(
                    "interval duration must be positive, got {}",
                    iv.duration
                )));
            }
            if iv.state != expected {
                return Err(domain("interval states must alternate, starting on"));
            }
            starts.push(t);
            t += iv.duration;
            expected = expected.flipped();
        }
        if t < horizon {
            return Err(domain(format!(
                "intervals cover {t} s, short of horizon {horizon} s"
            )));
        }
        Ok(Self {
            intervals,
            starts,
            horizon,
            seed,
        })
    }

    pub fn intervals(&self) -> &[LinkInterval] {
        &self.intervals
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Link state at time `t`; an instant on an interval edge belongs to the later interval.
    pub fn state_at(&self, t: f64) -> Result<LinkState> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(domain(format!(
                "t={t} outside schedule horizon [0, {}]",
                self.horizon
            )));
        }
        let idx = self.starts.partition_point(|&s| s <= t) - 1;
        Ok(self.intervals[idx].state)
    }

    /// Durations of all complete on-intervals (the last, horizon-truncated one excluded).
    pub fn on_durations(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.intervals.len();
        self.intervals[..n.saturating_sub(1)]
            .iter()
            .filter(|iv| iv.state.is_on())
            .map(|iv| iv.duration)
    }

    /// Fraction of `[0, horizon]` spent on.
    pub fn on_fraction(&self) -> f64 {
        let mut on = 0.0;
        for (iv, &start) in self.intervals.iter().zip(&self.starts) {
            if start >= self.horizon {
                break;
            }
            if iv.state.is_on() {
                on += iv.duration.min(self.horizon - start);
            }
        }
        on / self.horizon
    }
}

/// Samples an on/off schedule with availability `p_a` under the unit-sum
/// convention: on-durations ~ Exp(1 - p_a), off-durations ~ Exp(p_a).
pub fn sample_link_schedule(p_a: f64, horizon: f64, seed: u64) -> Result<LinkSchedule> {
    if !(p_a > 0.0 && p_a <= 1.0) {
        return Err(domain(format!(
            "availability must lie in (0, 1], got {p_a}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain(format!("horizon must be positive, got {horizon}")));
    }
    let lambda_off = 1.0 - p_a;
    if lambda_off == 0.0 {
        let only = LinkInterval {
            state: LinkState::On,
            duration: horizon,
        };
        return LinkSchedule::from_intervals(vec![only], horizon, seed);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut intervals = Vec::new();
    let mut t = 0.0;
    let mut state = LinkState::On;
    while t < horizon {
        let rate = if state.is_on() { lambda_off } else { p_a };
        let duration = sample_exponential(&mut rng, rate);
        intervals.push(LinkInterval { state, duration });
        t += duration;
        state = state.flipped();
    }
    LinkSchedule::from_intervals(intervals, horizon, seed)
}

/// Inverse-CDF exponential draw; never returns zero.
fn sample_exponential(rng: &mut impl Rng, rate: f64) -> f64 {
    loop {
        // 1 - U lies in (0, 1]
        let u: f64 = 1.0 - rng.random::<f64>();
        let x = -u.ln() / rate;
        if x > 0.0 {
            return x;
        }
    }
}

/// `mask[k] = state_at(k * dt)` for `k in 0..n_steps`.
pub fn make_mask(schedule: &LinkSchedule, dt: f64, n_steps: usize) -> Result<Vec<bool>> {
    if !(dt > 0.0) {
        return Err(domain(format!("dt must be positive, got {dt}")));
    }
    if n_steps == 0 {
        return Ok(Vec::new());
    }
    let last = (n_steps - 1) as f64 * dt;
    if last > schedule.horizon {
        return Err(domain(format!(
            "mask of {n_steps} steps at dt={dt} runs past horizon {}",
            schedule.horizon
        )));
    }
    // Single forward sweep; same edge convention as `state_at`.
    let mut mask = Vec::with_capacity(n_steps);
    let mut idx = 0;
    for k in 0..n_steps {
        let t = k as f64 * dt;
        while idx + 1 < schedule.starts.len() && schedule.starts[idx + 1] <= t {
            idx += 1;
        }
        mask.push(schedule.intervals[idx].state.is_on());
    }
    Ok(mask)
}

/// Writes a mask as CSV with columns `step,time_s,link_state`.
pub fn write_mask_csv(mut out: impl Write, mask: &[bool], dt: f64) -> std::io::Result<()> {
    writeln!(out, "step,time_s,link_state")?;
    for (k, &on) in mask.iter().enumerate() {
        writeln!(out, "{k},{},{}", k as f64 * dt, on as u8)?;
    }
    Ok(())
}

/// Number of integration steps covering a round trip of `2 * epsilon`.
pub fn delay_depth(epsilon: f64, dt: f64) -> Result<usize> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(domain(format!(
            "latency must be non-negative, got {epsilon}"
        )));
    }
    if !(dt > 0.0) {
        return Err(domain(format!("dt must be positive, got {dt}")));
    }
    Ok((2.0 * epsilon / dt).round() as usize)
}

/// Fixed-depth shift register for the command stream.
#[derive(Debug, Clone)]
pub struct DelayLine {
    depth: usize,
    buffer: VecDeque<CommandVector>,
}

impl DelayLine {
    /// A line of `depth` steps pre-filled with `fill` (normally the trim command).
    pub fn new(depth: usize, fill: CommandVector) -> Self {
        Self {
            depth,
            buffer: std::iter::repeat_n(fill, depth).collect(),
        }
    }

    pub fn for_latency(epsilon: f64, dt: f64, fill: CommandVector) -> Result<Self> {
        Ok(Self::new(delay_depth(epsilon, dt)?, fill))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Pushes `cmd_now` and returns the command pushed `depth` steps earlier.
    pub fn delayed(&mut self, cmd_now: CommandVector) -> CommandVector {
        if self.depth == 0 {
            return cmd_now;
        }
        self.buffer.push_back(cmd_now);
        self.buffer
            .pop_front()
            .expect("buffer holds depth + 1 entries")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossMode {
    /// The onboard inner loop keeps flying with zeroed references.
    #[default]
    FailsafeReference,
    /// Commands are multiplied by the link state: all-zero when off.
    ZeroControl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThrottleOnLoss {
    #[default]
    HoldLast,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LossPolicy {
    pub mode: LossMode,
    pub throttle: ThrottleOnLoss,
}

impl LossPolicy {
    pub const ZERO_CONTROL: LossPolicy = LossPolicy {
        mode: LossMode::ZeroControl,
        throttle: ThrottleOnLoss::Zero,
    };
}

impl fmt::Display for LossPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.mode, self.throttle) {
            (LossMode::ZeroControl, _) => f.write_str("zero-control"),
            (LossMode::FailsafeReference, ThrottleOnLoss::HoldLast) => f.write_str("failsafe"),
            (LossMode::FailsafeReference, ThrottleOnLoss::Zero) => {
                f.write_str("failsafe-zero-throttle")
            }
        }
    }
}

impl FromStr for LossPolicy {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "failsafe" | "failsafe-reference" => Ok(LossPolicy::default()),
            "failsafe-zero-throttle" => Ok(LossPolicy {
                mode: LossMode::FailsafeReference,
                throttle: ThrottleOnLoss::Zero,
            }),
            "zero-control" => Ok(LossPolicy::ZERO_CONTROL),
            other => Err(domain(format!(
                "unknown loss policy '{other}' (expected failsafe, failsafe-zero-throttle or zero-control)"
            ))),
        }
    }
}

/// Chooses the command the aircraft actually flies with.
pub fn apply_link_policy(
    link: LinkState,
    remote_delayed: CommandVector,
    failsafe: CommandVector,
    policy: LossPolicy,
) -> CommandVector {
    match (link, policy.mode) {
        (LinkState::On, _) => remote_delayed,
        (LinkState::Off, LossMode::FailsafeReference) => failsafe,
        (LinkState::Off, LossMode::ZeroControl) => CommandVector::ZERO,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmd(x: f64) -> CommandVector {
        CommandVector {
            throttle: x,
            elevator: -x,
            aileron: 2.0 * x,
            rudder: 3.0 * x,
        }
    }

    #[test]
    fn full_availability_is_one_interval() {
        let s = sample_link_schedule(1.0, 100.0, 7).unwrap();
        assert_eq!(s.intervals().len(), 1);
        assert!(s.intervals()[0].state.is_on());
        assert!(s.intervals()[0].duration >= 100.0);
        assert!(make_mask(&s, 0.01, 10_001).unwrap().iter().all(|&b| b));
    }

    #[test]
    fn zero_availability_rejected() {
        assert!(sample_link_schedule(0.0, 10.0, 1).is_err());
        assert!(sample_link_schedule(1.1, 10.0, 1).is_err());
        assert!(sample_link_schedule(0.5, 0.0, 1).is_err());
    }

    #[test]
    fn on_fraction_converges() {
        let s = sample_link_schedule(0.8, 1e5, 42).unwrap();
        let f = s.on_fraction();
        assert!((0.79..=0.81).contains(&f), "{f}");
    }

    #[test]
    fn schedules_are_deterministic() {
        let a = sample_link_schedule(0.73, 500.0, 99).unwrap();
        let b = sample_link_schedule(0.73, 500.0, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_link_schedule(0.73, 500.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn state_lookup_and_edges() {
        let s = LinkSchedule::from_durations(&[5.0, 3.0, 4.0], 12.0).unwrap();
        assert_eq!(s.state_at(0.0).unwrap(), LinkState::On);
        assert_eq!(s.state_at(6.0).unwrap(), LinkState::Off);
        assert_eq!(s.state_at(5.0).unwrap(), LinkState::Off);
        assert_eq!(s.state_at(8.0).unwrap(), LinkState::On);
        assert!(s.state_at(12.5).is_err());
        assert!(s.state_at(-0.1).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(LinkSchedule::from_durations(&[5.0, 3.0], 9.0).is_err());
        assert!(LinkSchedule::from_durations(&[5.0, 0.0, 3.0], 8.0).is_err());
        assert!(LinkSchedule::from_durations(&[], 1.0).is_err());
    }

    #[test]
    fn mask_matches_state_at() {
        let s = sample_link_schedule(0.6, 300.0, 3).unwrap();
        let dt = 0.01;
        let mask = make_mask(&s, dt, 30_001).unwrap();
        for (k, &m) in mask.iter().enumerate() {
            assert_eq!(m, s.state_at(k as f64 * dt).unwrap().is_on(), "step {k}");
        }
    }

    #[test]
    fn mask_mean_tracks_availability() {
        let s = sample_link_schedule(0.7, 1e5, 11).unwrap();
        let mask = make_mask(&s, 1.0, 100_000).unwrap();
        let mean = mask.iter().filter(|&&b| b).count() as f64 / mask.len() as f64;
        assert!((mean - 0.7).abs() <= 0.02, "{mean}");
    }

    #[test]
    fn mask_edge_cases() {
        let s = sample_link_schedule(0.9, 10.0, 1).unwrap();
        assert!(make_mask(&s, 0.1, 0).unwrap().is_empty());
        assert!(make_mask(&s, 0.1, 102).is_err());
        assert!(make_mask(&s, 0.0, 5).is_err());
    }

    #[test]
    fn mask_csv_layout() {
        let mut buf = Vec::new();
        write_mask_csv(&mut buf, &[true, false], 0.5).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step,time_s,link_state\n0,0,1\n1,0.5,0\n"
        );
    }

    #[test]
    fn delay_depths() {
        assert_eq!(delay_depth(0.0, 1e-3).unwrap(), 0);
        assert_eq!(delay_depth(0.05, 1e-3).unwrap(), 100);
        for k in 0..=100 {
            let eps = k as f64 * 1e-3;
            assert_eq!(delay_depth(eps, 1e-3).unwrap(), 2 * k);
        }
        assert!(delay_depth(-1e-3, 1e-3).is_err());
    }

    #[test]
    fn delay_identity_and_warmup() {
        let mut line = DelayLine::new(0, cmd(0.0));
        assert_eq!(line.delayed(cmd(4.0)), cmd(4.0));

        let fill = cmd(0.5);
        let mut line = DelayLine::for_latency(0.002, 1e-3, fill).unwrap();
        assert_eq!(line.depth(), 4);
        let out: Vec<_> = (1..=8).map(|k| line.delayed(cmd(k as f64))).collect();
        assert_eq!(&out[..4], &[fill; 4]);
        assert_eq!(&out[4..], &[cmd(1.0), cmd(2.0), cmd(3.0), cmd(4.0)]);
    }

    #[test]
    fn link_policy_selection() {
        let (r, f) = (cmd(1.0), cmd(2.0));
        for policy in [LossPolicy::default(), LossPolicy::ZERO_CONTROL] {
            assert_eq!(apply_link_policy(LinkState::On, r, f, policy), r);
        }
        assert_eq!(
            apply_link_policy(LinkState::Off, r, f, LossPolicy::ZERO_CONTROL),
            CommandVector::ZERO
        );
        assert_eq!(
            apply_link_policy(LinkState::Off, r, f, LossPolicy::default()),
            f
        );
    }

    #[test]
    fn loss_policy_parsing_round_trips() {
        for name in ["failsafe", "failsafe-zero-throttle", "zero-control"] {
            let p: LossPolicy = name.parse().unwrap();
            assert_eq!(p.to_string(), name);
        }
        assert!("sometimes".parse::<LossPolicy>().is_err());
    }
}
