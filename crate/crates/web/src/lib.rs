//! WebAssembly bindings for the browser demo: communicability curves, a
//! sampled link mask and a full mission trajectory.
//!
//! Each export is a thin wrapper over a plain function so the same code runs
//! in native tests.

use rpas_core::channel::{make_mask, sample_link_schedule};
use rpas_core::mission::{Mission, RunConfig, ScenarioConfig};
use rpas_core::rcp;
use std::cell::OnceCell;
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `n` evenly spaced availabilities over `[pa_lo, pa_hi]`.
pub fn pa_axis(pa_lo: f64, pa_hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(0.0 < pa_lo && pa_lo < pa_hi && pa_hi <= 1.0) {
        return Err(format!("need 0 < lo < hi <= 1 and n >= 2, got [{pa_lo}, {pa_hi}], n={n}"));
    }
    let step = (pa_hi - pa_lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { pa_hi } else { pa_lo + step * i as f64 }).collect())
}

/// Communicability at each point of `pa_axis(pa_lo, pa_hi, n)`.
pub fn curve(tau_msg: f64, epsilon: f64, pa_lo: f64, pa_hi: f64, n: usize) -> Result<Vec<f64>> {
    pa_axis(pa_lo, pa_hi, n)?
        .into_iter()
        .map(|pa| rcp::communicability(pa, tau_msg, epsilon).map_err(|e| e.to_string()))
        .collect()
}

/// One byte per step, 1 while the link is on.
pub fn mask(p_a: f64, horizon: f64, dt: f64, seed: u64) -> Result<Vec<u8>> {
    if !(dt > 0.0 && horizon >= dt) {
        return Err(format!("need 0 < dt <= horizon, got dt={dt}, horizon={horizon}"));
    }
    let n = (horizon / dt).floor() as usize;
    let schedule = sample_link_schedule(p_a, horizon, seed).map_err(|e| e.to_string())?;
    let mask = make_mask(&schedule, dt, n).map_err(|e| e.to_string())?;
    Ok(mask.into_iter().map(u8::from).collect())
}

thread_local! {
    static MISSIONS: [OnceCell<Mission>; 2] = const { [OnceCell::new(), OnceCell::new()] };
}

fn with_mission<T>(scenario: u8, f: impl FnOnce(&Mission) -> Result<T>) -> Result<T> {
    let idx = match scenario {
        1 | 2 => usize::from(scenario - 1),
        _ => return Err(format!("scenario must be 1 or 2, got {scenario}")),
    };
    MISSIONS.with(|cells| {
        let cell = &cells[idx];
        if cell.get().is_none() {
            let config = if idx == 0 {
                ScenarioConfig::scenario1()
            } else {
                ScenarioConfig::scenario2()
            };
            let mission = Mission::with_defaults(config).map_err(|e| e.to_string())?;
            let _ = cell.set(mission);
        }
        f(cell.get().expect("set above"))
    })
}

/// Mission outcome plus a decimated ground track.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct MissionView {
    success: bool,
    completion_time: Option<f64>,
    failure_mode: Option<String>,
    waypoints_reached: usize,
    time: Vec<f64>,
    north: Vec<f64>,
    east: Vec<f64>,
    altitude: Vec<f64>,
    link: Vec<u8>,
    waypoint_north: Vec<f64>,
    waypoint_east: Vec<f64>,
}

#[wasm_bindgen]
impl MissionView {
    #[wasm_bindgen(getter)]
    pub fn success(&self) -> bool {
        self.success
    }

    #[wasm_bindgen(getter)]
    pub fn completion_time(&self) -> Option<f64> {
        self.completion_time
    }

    #[wasm_bindgen(getter)]
    pub fn failure_mode(&self) -> Option<String> {
        self.failure_mode.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn waypoints_reached(&self) -> usize {
        self.waypoints_reached
    }

    #[wasm_bindgen(getter)]
    pub fn time(&self) -> Vec<f64> {
        self.time.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn north(&self) -> Vec<f64> {
        self.north.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn east(&self) -> Vec<f64> {
        self.east.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn altitude(&self) -> Vec<f64> {
        self.altitude.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn link(&self) -> Vec<u8> {
        self.link.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn waypoint_north(&self) -> Vec<f64> {
        self.waypoint_north.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn waypoint_east(&self) -> Vec<f64> {
        self.waypoint_east.clone()
    }
}

/// Runs a bundled scenario and keeps every `stride`-th row plus the last.
pub fn fly(scenario: u8, p_a: f64, epsilon: f64, seed: u64, stride: usize) -> Result<MissionView> {
    let stride = stride.max(1);
    with_mission(scenario, |mission| {
        let run = RunConfig {
            p_a,
            epsilon,
            seed,
            ..RunConfig::ideal()
        };
        let out = mission.run_with_trajectory(&run).map_err(|e| e.to_string())?;
        let rows = out.trajectory.map(|t| t.rows).unwrap_or_default();
        let keep = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| k % stride == 0 || k + 1 == rows.len())
            .map(|(_, r)| r);
        let mut view = MissionView {
            success: out.record.success,
            completion_time: out.record.completion_time,
            failure_mode: out.record.failure_mode.map(|m| m.as_str().to_owned()),
            waypoints_reached: out.record.waypoints_reached,
            time: Vec::new(),
            north: Vec::new(),
            east: Vec::new(),
            altitude: Vec::new(),
            link: Vec::new(),
            waypoint_north: mission.scenario().waypoints.iter().map(|w| w.north_ft).collect(),
            waypoint_east: mission.scenario().waypoints.iter().map(|w| w.east_ft).collect(),
        };
        for r in keep {
            view.time.push(r.time_s);
            view.north.push(r.state.x_e);
            view.east.push(r.state.y_e);
            view.altitude.push(r.state.altitude());
            view.link.push(u8::from(r.link_on));
        }
        Ok(view)
    })
}

#[wasm_bindgen]
pub fn message_duration(size_bits: f64, bitrate: f64) -> std::result::Result<f64, JsError> {
    js(rcp::message_duration(size_bits, bitrate).map_err(|e| e.to_string()))
}

#[wasm_bindgen]
pub fn availability_axis(pa_lo: f64, pa_hi: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(pa_axis(pa_lo, pa_hi, n))
}

#[wasm_bindgen]
pub fn communicability_curve(
    tau_msg: f64,
    epsilon: f64,
    pa_lo: f64,
    pa_hi: f64,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    js(curve(tau_msg, epsilon, pa_lo, pa_hi, n))
}

#[wasm_bindgen]
pub fn link_mask(p_a: f64, horizon: f64, dt: f64, seed: u64) -> std::result::Result<Vec<u8>, JsError> {
    js(mask(p_a, horizon, dt, seed))
}

#[wasm_bindgen]
pub fn simulate(
    scenario: u8,
    p_a: f64,
    epsilon: f64,
    seed: u64,
    stride: usize,
) -> std::result::Result<MissionView, JsError> {
    js(fly(scenario, p_a, epsilon, seed, stride))
}
