//! Monte Carlo sweeps over link availability and latency, and their
//! aggregation into success-rate and completion-time surfaces,
//! communicability curves and the latency-blockage report.

mod aggregate;
mod blockage;
mod io;

pub use aggregate::{
    communicability_curves, completion_time_surface, corner_rate, success_surface, Axis, BinStats, CurvePoint,
    EnvelopeGrid,
};
pub use blockage::{detect_bands, latency_blockage_sweep, BlockageBand, BlockagePoint, BlockageReport};
pub use io::{
    read_records_csv, write_blockage_csv, write_curves_csv, write_records_csv, write_surface_csv, BLOCKAGE_HEADER,
    CURVES_HEADER, RECORDS_HEADER, SURFACE_HEADER,
};

use crate::channel::LossPolicy;
use crate::error::{Error, Result};
use crate::mission::{Mission, RunConfig, RunRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Uniform distribution over the points `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridUniform {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridUniform {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let g = GridUniform { lo, hi, step };
        g.validate()?;
        Ok(g)
    }

    /// Steps per unit; grid values are `k / scale` for integer `k`.
    fn scale(&self) -> f64 {
        (1.0 / self.step).round()
    }

    fn index_range(&self) -> (u64, u64) {
        let s = self.scale();
        ((self.lo * s).round() as u64, (self.hi * s).round() as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let on_grid = |x: f64| {
            let k = x / self.step;
            (k - k.round()).abs() < 1e-9
        };
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("grid step must be positive, got {}", self.step)));
        }
        let s = 1.0 / self.step;
        if (s - s.round()).abs() > 1e-9 * s {
            return Err(Error::Config(format!("grid step {} must divide 1", self.step)));
        }
        if !(self.lo >= 0.0 && self.lo <= self.hi && self.hi.is_finite()) {
            return Err(Error::Config(format!("bad grid range [{}, {}]", self.lo, self.hi)));
        }
        if !on_grid(self.lo) || !on_grid(self.hi) {
            return Err(Error::Config(format!(
                "grid step {} does not divide [{}, {}]",
                self.step, self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn n_points(&self) -> u64 {
        let (a, b) = self.index_range();
        b - a + 1
    }

    /// The `i`-th grid point, correctly rounded from `k / scale`.
    pub fn point(&self, i: u64) -> f64 {
        let (a, _) = self.index_range();
        (a + i) as f64 / self.scale()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        self.point(rng.random_range(0..self.n_points()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub p_a: GridUniform,
    pub epsilon: GridUniform,
    pub n_samples: usize,
    pub base_seed: u64,
    /// Worker threads; `None` uses the available hardware parallelism.
    pub workers: Option<usize>,
    pub loss_policy: LossPolicy,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            p_a: GridUniform {
                lo: 0.5,
                hi: 1.0,
                step: 1e-3,
            },
            epsilon: GridUniform {
                lo: 0.0,
                hi: 0.1,
                step: 1e-3,
            },
            n_samples: 20_000,
            base_seed: 0x5eed_2024,
            workers: None,
            loss_policy: LossPolicy::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.p_a.validate()?;
        self.epsilon.validate()?;
        if !(self.p_a.lo > 0.0 && self.p_a.hi <= 1.0) {
            return Err(Error::Config("p_a grid must lie in (0, 1]".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(s).map_err(|source| Error::Json {
            path: "<sweep>".into(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Link realisation of run `i`. Depends only on the base seed and `i`.
    pub fn run_config(&self, i: usize) -> RunConfig {
        let seed = mix_seed(self.base_seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Stream 0 of the same seed drives the link schedule.
        rng.set_stream(1);
        let p_a = self.p_a.sample(&mut rng);
        let epsilon = self.epsilon.sample(&mut rng);
        RunConfig {
            p_a,
            epsilon,
            seed,
            loss_policy: self.loss_policy,
        }
    }
}

/// SplitMix64 finaliser applied to `base + (i + 1) * golden`.
pub fn mix_seed(base: u64, i: u64) -> u64 {
    let mut z = base.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub run_id: usize,
    pub record: RunRecord,
}

/// Raised when some runs of a sweep could not produce a record. Carries
/// everything that did complete.
#[derive(Debug, Clone)]
pub struct SweepAborted {
    pub completed: Vec<SweepRecord>,
    pub failures: Vec<(usize, String)>,
}

impl fmt::Display for SweepAborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} runs failed",
            self.failures.len(),
            self.failures.len() + self.completed.len()
        )?;
        if let Some((id, msg)) = self.failures.first() {
            write!(f, " (first: run {id}: {msg})")?;
        }
        Ok(())
    }
}

impl std::error::Error for SweepAborted {}

/// Runs `cfg.n_samples` missions. Records come back ordered by run id and
/// are identical for any worker count.
pub fn run_sweep(mission: &Mission, cfg: &SweepConfig) -> std::result::Result<Vec<SweepRecord>, SweepAborted> {
    run_sweep_with_progress(mission, cfg, &|_, _| {})
}

/// [`run_sweep`] calling `progress(done, total)` after every run.
pub fn run_sweep_with_progress(
    mission: &Mission,
    cfg: &SweepConfig,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> std::result::Result<Vec<SweepRecord>, SweepAborted> {
    if let Err(e) = cfg.validate() {
        return Err(SweepAborted {
            completed: Vec::new(),
            failures: vec![(0, e.to_string())],
        });
    }
    let runs: Vec<RunConfig> = (0..cfg.n_samples).map(|i| cfg.run_config(i)).collect();
    let results = map_runs(&runs, cfg.workers, progress, |run| mission.run(run));
    collect(results)
}

pub(crate) fn collect(
    results: Vec<std::result::Result<RunRecord, String>>,
) -> std::result::Result<Vec<SweepRecord>, SweepAborted> {
    let mut completed = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (run_id, r) in results.into_iter().enumerate() {
        match r {
            Ok(record) => completed.push(SweepRecord { run_id, record }),
            Err(msg) => failures.push((run_id, msg)),
        }
    }
    if failures.is_empty() {
        Ok(completed)
    } else {
        Err(SweepAborted { completed, failures })
    }
}

/// Applies `f` to every run, in parallel when enabled. A panicking run is
/// reported as an error instead of taking the sweep down.
pub(crate) fn map_runs<F>(
    runs: &[RunConfig],
    workers: Option<usize>,
    progress: &(dyn Fn(usize, usize) + Sync),
    f: F,
) -> Vec<std::result::Result<RunRecord, String>>
where
    F: Fn(&RunConfig) -> Result<RunRecord> + Sync,
{
    let done = AtomicUsize::new(0);
    let total = runs.len();
    let one = |run: &RunConfig| {
        let out = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(run))) {
            Ok(Ok(record)) => Ok(record),
            Ok(Err(e)) => Err(e.to_string()),
            Err(panic) => Err(panic_message(panic.as_ref())),
        };
        progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
        out
    };
    par_map(runs, workers, one)
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], workers: Option<usize>, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    use rayon::prelude::*;
    let n = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], _workers: Option<usize>, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    items.iter().map(f).collect()
}

fn panic_message(panic: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = panic.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic".into()
    }
}
