//! Deterministic latency sweep at full availability and detection of
//! latency bands that block an otherwise flyable mission.

use super::{collect, map_runs};
use crate::channel::LossPolicy;
use crate::error::{Error, Result};
use crate::mission::{FailureMode, Mission, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockagePoint {
    pub epsilon: f64,
    pub success: bool,
    pub completion_time: Option<f64>,
    pub failure_mode: Option<FailureMode>,
}

/// A maximal run of failing latencies with a success on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageBand {
    /// First and last failing latency.
    pub eps_start: f64,
    pub eps_end: f64,
    /// Neighbouring successful latencies.
    pub success_below: f64,
    pub success_above: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockageReport {
    pub points: Vec<BlockagePoint>,
    pub bands: Vec<BlockageBand>,
}

/// Flags every success, failure..., success pattern along `points`, which
/// must be sorted by latency.
pub fn detect_bands(points: &[(f64, bool)]) -> Vec<BlockageBand> {
    let mut bands = Vec::new();
    let mut last_success: Option<usize> = None;
    for (k, &(_, ok)) in points.iter().enumerate() {
        if !ok {
            continue;
        }
        if let Some(s) = last_success {
            if k > s + 1 {
                bands.push(BlockageBand {
                    eps_start: points[s + 1].0,
                    eps_end: points[k - 1].0,
                    success_below: points[s].0,
                    success_above: points[k].0,
                });
            }
        }
        last_success = Some(k);
    }
    bands
}

/// One run per latency at `P_A = 1`; the link never drops, so the seed is
/// irrelevant and every run is deterministic.
pub fn latency_blockage_sweep(
    mission: &Mission,
    eps_grid: &[f64],
    loss_policy: LossPolicy,
    workers: Option<usize>,
) -> Result<BlockageReport> {
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("latency grid must be non-empty and strictly increasing".into()));
    }
    let runs: Vec<RunConfig> = eps_grid
        .iter()
        .map(|&epsilon| RunConfig {
            p_a: 1.0,
            epsilon,
            seed: 0,
            loss_policy,
        })
        .collect();
    for r in &runs {
        r.validate()?;
    }
    let records = collect(map_runs(&runs, workers, &|_, _| {}, |run| mission.run(run)))
        .map_err(|e| Error::Config(format!("blockage sweep aborted: {e}")))?;
    let points: Vec<BlockagePoint> = records
        .iter()
        .map(|r| BlockagePoint {
            epsilon: r.record.epsilon,
            success: r.record.success,
            completion_time: r.record.completion_time,
            failure_mode: r.record.failure_mode,
        })
        .collect();
    let flags: Vec<(f64, bool)> = points.iter().map(|p| (p.epsilon, p.success)).collect();
    Ok(BlockageReport {
        bands: detect_bands(&flags),
        points,
    })
}
