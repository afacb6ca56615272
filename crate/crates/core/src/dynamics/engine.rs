//! Turbofan model: throttle gearing, power-state lag and thrust tables.

use super::params::{EngineData, EngineLag};

/// Commanded power (percent) for a throttle setting in [0, 1].
pub fn throttle_gearing(lag: EngineLag, throttle: f64) -> f64 {
    match lag {
        EngineLag::Constant { .. } => 100.0 * throttle,
        EngineLag::StevensLewis => {
            if throttle <= 0.77 {
                64.94 * throttle
            } else {
                217.38 * throttle - 117.38
            }
        }
    }
}

/// Inverse of [`throttle_gearing`].
pub fn throttle_for_power(lag: EngineLag, power: f64) -> f64 {
    match lag {
        EngineLag::Constant { .. } => power / 100.0,
        EngineLag::StevensLewis => {
            if power <= 64.94 * 0.77 {
                power / 64.94
            } else {
                (power + 117.38) / 217.38
            }
        }
    }
}

fn reciprocal_time_constant(dp: f64) -> f64 {
    if dp <= 25.0 {
        1.0
    } else if dp >= 50.0 {
        0.1
    } else {
        1.9 - 0.036 * dp
    }
}

/// Lag target and time constant for the current and commanded power.
///
/// The power rate is `(target - power) / time_constant`.
pub fn lag_target(lag: EngineLag, power: f64, commanded: f64) -> (f64, f64) {
    match lag {
        EngineLag::Constant { time_constant_s } => (commanded, time_constant_s),
        EngineLag::StevensLewis => {
            let (target, rate) = if commanded >= 50.0 {
                if power >= 50.0 {
                    (commanded, 5.0)
                } else {
                    (60.0, reciprocal_time_constant(60.0 - power))
                }
            } else if power >= 50.0 {
                (40.0, 5.0)
            } else {
                (commanded, reciprocal_time_constant(commanded - power))
            };
            (target, 1.0 / rate)
        }
    }
}

/// Time derivative of the power state.
pub fn power_rate(lag: EngineLag, power: f64, throttle: f64) -> f64 {
    let commanded = throttle_gearing(lag, throttle);
    let (target, time_constant) = lag_target(lag, power, commanded);
    (target - power) / time_constant
}

fn bracket(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    let i = grid.partition_point(|&g| g <= x).clamp(1, n - 1) - 1;
    let frac = (x - grid[i]) / (grid[i + 1] - grid[i]);
    (i, frac)
}

fn bilinear(table: &[Vec<f64>], (m, dm): (usize, f64), (h, dh): (usize, f64)) -> f64 {
    let lo = table[m][h] + (table[m][h + 1] - table[m][h]) * dh;
    let hi = table[m + 1][h] + (table[m + 1][h + 1] - table[m + 1][h]) * dh;
    lo + (hi - lo) * dm
}

/// Installed thrust in lbf. Power 0–50 % blends idle to military, 50–100 %
/// military to maximum. Tables extrapolate linearly beyond their grid.
pub fn thrust(engine: &EngineData, power: f64, alt_ft: f64, mach: f64) -> f64 {
    let alt = alt_ft.max(0.01);
    let mach = mach.max(1e-6);
    let hb = bracket(&engine.altitudes_ft, alt);
    let mb = bracket(&engine.machs, mach);
    let mil = bilinear(&engine.mil_lbf, mb, hb);
    if power < 50.0 {
        let idle = bilinear(&engine.idle_lbf, mb, hb);
        idle + (mil - idle) * power * 0.02
    } else {
        let max = bilinear(&engine.max_lbf, mb, hb);
        mil + (max - mil) * (power - 50.0) * 0.02
    }
}
