//! Binning of run records into surfaces and curves. Every aggregate is a
//! sum of per-bin [`BinStats`], so partial results merge in any order.

use super::SweepRecord;
use crate::error::{Error, Result};
use crate::rcp::{communicability_for, MessageSpec};
use std::ops::{Add, AddAssign};

/// Bin edges along one axis. Bins are `[e_i, e_{i+1})`, the last one closed.
/// Values within a relative `1e-9` of an interior edge count as on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    edges: Vec<f64>,
}

impl Axis {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("bin edges must be finite and strictly increasing: {edges:?}")));
        }
        Ok(Axis { edges })
    }

    /// `n` equal bins over `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("bin count must be positive".into()));
        }
        Self::new((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.edges[i], self.edges[i + 1])
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let e = &self.edges;
        let tol = 1e-9 * (e[e.len() - 1] - e[0]);
        if !(x >= e[0] - tol && x <= e[e.len() - 1] + tol) {
            return None;
        }
        // Count interior edges at or below x.
        let k = e[1..e.len() - 1].iter().take_while(|&&edge| x >= edge - tol).count();
        Some(k)
    }
}

/// Per-bin counters: a commutative monoid under `+`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BinStats {
    pub count: u64,
    pub successes: u64,
    /// Sum and count of completion times over successful runs.
    pub time_sum: f64,
    pub time_count: u64,
}

impl BinStats {
    pub fn of(record: &crate::mission::RunRecord) -> Self {
        let t = record.completion_time.filter(|_| record.success);
        BinStats {
            count: 1,
            successes: record.success as u64,
            time_sum: t.unwrap_or(0.0),
            time_count: t.is_some() as u64,
        }
    }

    /// `None` for an empty bin.
    pub fn success_rate(&self) -> Option<f64> {
        (self.count > 0).then(|| self.successes as f64 / self.count as f64)
    }

    /// `None` when the bin has no successful run.
    pub fn mean_completion_time(&self) -> Option<f64> {
        (self.time_count > 0).then(|| self.time_sum / self.time_count as f64)
    }
}

impl Add for BinStats {
    type Output = BinStats;

    fn add(self, o: BinStats) -> BinStats {
        BinStats {
            count: self.count + o.count,
            successes: self.successes + o.successes,
            time_sum: self.time_sum + o.time_sum,
            time_count: self.time_count + o.time_count,
        }
    }
}

impl AddAssign for BinStats {
    fn add_assign(&mut self, o: BinStats) {
        *self = *self + o;
    }
}

/// Records binned over availability (rows) and latency (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeGrid {
    pub p_a: Axis,
    pub epsilon: Axis,
    /// Row-major, `p_a.len() * epsilon.len()` cells.
    cells: Vec<BinStats>,
}

impl EnvelopeGrid {
    pub fn empty(p_a: Axis, epsilon: Axis) -> Self {
        let n = p_a.len() * epsilon.len();
        EnvelopeGrid {
            p_a,
            epsilon,
            cells: vec![BinStats::default(); n],
        }
    }

    /// Adds a record; records outside both axes' ranges are rejected.
    pub fn insert(&mut self, record: &crate::mission::RunRecord) -> Result<()> {
        let (i, j) = match (self.p_a.bin_of(record.p_a), self.epsilon.bin_of(record.epsilon)) {
            (Some(i), Some(j)) => (i, j),
            _ => {
                return Err(Error::Config(format!(
                    "record (p_a {}, epsilon {}) lies outside the grid",
                    record.p_a, record.epsilon
                )))
            }
        };
        let n = self.epsilon.len();
        self.cells[i * n + j] += BinStats::of(record);
        Ok(())
    }

    pub fn from_records(records: &[SweepRecord], p_a: Axis, epsilon: Axis) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Config("no records to aggregate".into()));
        }
        let mut grid = Self::empty(p_a, epsilon);
        for r in records {
            grid.insert(&r.record)?;
        }
        Ok(grid)
    }

    /// Cell-wise sum of two grids over identical axes.
    pub fn merge(&self, other: &EnvelopeGrid) -> Result<EnvelopeGrid> {
        if self.p_a != other.p_a || self.epsilon != other.epsilon {
            return Err(Error::Config("cannot merge grids with different bins".into()));
        }
        Ok(EnvelopeGrid {
            p_a: self.p_a.clone(),
            epsilon: self.epsilon.clone(),
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn cell(&self, i: usize, j: usize) -> BinStats {
        self.cells[i * self.epsilon.len() + j]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().map(|c| c.count).sum()
    }

    /// `(i, j, stats)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, BinStats)> + '_ {
        let n = self.epsilon.len();
        self.cells.iter().enumerate().map(move |(k, c)| (k / n, k % n, *c))
    }
}

/// Success-rate surface with `n_pa x n_eps` equal bins over the given ranges.
pub fn success_surface(
    records: &[SweepRecord],
    pa_range: (f64, f64, usize),
    eps_range: (f64, f64, usize),
) -> Result<EnvelopeGrid> {
    EnvelopeGrid::from_records(
        records,
        Axis::uniform(pa_range.0, pa_range.1, pa_range.2)?,
        Axis::uniform(eps_range.0, eps_range.1, eps_range.2)?,
    )
}

/// Same bins as [`success_surface`]; read [`BinStats::mean_completion_time`]
/// per cell. Failed runs never contribute a time.
pub fn completion_time_surface(
    records: &[SweepRecord],
    pa_range: (f64, f64, usize),
    eps_range: (f64, f64, usize),
) -> Result<EnvelopeGrid> {
    success_surface(records, pa_range, eps_range)
}

/// Pooled counters over the closed region `pa x eps`.
pub fn corner_rate(records: &[SweepRecord], pa: (f64, f64), eps: (f64, f64)) -> BinStats {
    let inside = |x: f64, (lo, hi): (f64, f64)| x >= lo - 1e-12 && x <= hi + 1e-12;
    records
        .iter()
        .filter(|r| inside(r.record.p_a, pa) && inside(r.record.epsilon, eps))
        .map(|r| BinStats::of(&r.record))
        .fold(BinStats::default(), |a, b| a + b)
}

/// One point of a success-vs-communicability curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub p_comm_lo: f64,
    pub p_comm_hi: f64,
    pub stats: BinStats,
}

impl CurvePoint {
    pub fn p_comm_mid(&self) -> f64 {
        0.5 * (self.p_comm_lo + self.p_comm_hi)
    }
}

/// Maps every record to its communicability and bins it by `P_comm` within
/// its latency interval. Empty bins are left out.
pub fn communicability_curves(
    records: &[SweepRecord],
    msg: &MessageSpec,
    eps_intervals: &Axis,
    p_comm_bins: &Axis,
) -> Result<Vec<CurvePoint>> {
    let (ne, nc) = (eps_intervals.len(), p_comm_bins.len());
    let mut cells = vec![BinStats::default(); ne * nc];
    for r in records {
        let rec = &r.record;
        let j = eps_intervals
            .bin_of(rec.epsilon)
            .ok_or_else(|| Error::Config(format!("epsilon {} outside the latency intervals", rec.epsilon)))?;
        let p = communicability_for(rec.p_a, msg, rec.epsilon)?;
        let k = p_comm_bins
            .bin_of(p)
            .ok_or_else(|| Error::Config(format!("P_comm {p} outside the communicability bins")))?;
        cells[j * nc + k] += BinStats::of(rec);
    }
    Ok(cells
        .iter()
        .enumerate()
        .filter(|(_, s)| s.count > 0)
        .map(|(idx, s)| {
            let (j, k) = (idx / nc, idx % nc);
            let (eps_lo, eps_hi) = eps_intervals.bounds(j);
            let (p_comm_lo, p_comm_hi) = p_comm_bins.bounds(k);
            CurvePoint {
                eps_lo,
                eps_hi,
                p_comm_lo,
                p_comm_hi,
                stats: *s,
            }
        })
        .collect())
}
