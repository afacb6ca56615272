//! Per-step capture of a run and its CSV export.

use crate::control::{CommandVector, LoopOutputs, ReferenceVector};
use crate::dynamics::AircraftState;
use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

pub const TRAJECTORY_HEADER: [&str; 23] = [
    "time_s",
    "x_e",
    "y_e",
    "h",
    "Vt",
    "alpha",
    "beta",
    "phi",
    "theta",
    "psi",
    "p",
    "q",
    "r",
    "pow",
    "de",
    "da",
    "dr",
    "dt_cmd",
    "Nz",
    "ps",
    "Nyr",
    "link_state",
    "waypoint_index",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub time_s: f64,
    pub state: AircraftState,
    /// Command applied over the step starting at `time_s`.
    pub command: CommandVector,
    /// Measured normal load factor, stability roll rate and `Nyr` blend.
    pub nz: f64,
    pub ps: f64,
    pub nyr: f64,
    /// Reference in force on board for this step.
    pub reference: ReferenceVector,
    pub link_on: bool,
    pub waypoint_index: usize,
}

impl TrajectoryRow {
    pub(crate) fn new(
        time_s: f64,
        state: &AircraftState,
        command: &CommandVector,
        measured: &LoopOutputs,
        reference: ReferenceVector,
        link_on: bool,
        waypoint_index: usize,
    ) -> Self {
        TrajectoryRow {
            time_s,
            state: *state,
            command: *command,
            nz: measured.nz,
            ps: measured.ps,
            nyr: measured.nyr,
            reference,
            link_on,
            waypoint_index,
        }
    }

    /// Row for a state the aerodynamic model could not evaluate.
    pub(crate) fn unmeasured(
        time_s: f64,
        state: &AircraftState,
        command: &CommandVector,
        reference: ReferenceVector,
        link_on: bool,
        waypoint_index: usize,
    ) -> Self {
        let nan = LoopOutputs {
            nz: f64::NAN,
            ps: f64::NAN,
            nyr: f64::NAN,
        };
        Self::new(
            time_s,
            state,
            command,
            &nan,
            reference,
            link_on,
            waypoint_index,
        )
    }

    fn fields(&self) -> [String; 23] {
        let s = &self.state;
        let c = &self.command;
        [
            self.time_s,
            s.x_e,
            s.y_e,
            s.altitude(),
            s.vt(),
            s.alpha(),
            s.beta(),
            s.phi,
            s.theta,
            s.psi,
            s.p,
            s.q,
            s.r,
            s.pow,
            c.elevator,
            c.aileron,
            c.rudder,
            c.throttle,
            self.nz,
            self.ps,
            self.nyr,
        ]
        .map(|x| x.to_string())
        .into_iter()
        .chain([
            (self.link_on as u8).to_string(),
            self.waypoint_index.to_string(),
        ])
        .collect::<Vec<_>>()
        .try_into()
        .expect("23 columns")
    }
}

/// Every step of one run, in order. Row `k` is at `k * dt`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    pub(crate) fn with_capacity(dt: f64, n: usize) -> Self {
        Trajectory {
            dt,
            rows: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push(&mut self, row: TrajectoryRow) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Simulated time covered, i.e. the time of the last row.
    pub fn duration(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.time_s)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRAJECTORY_HEADER)?;
        for row in &self.rows {
            w.write_record(row.fields())?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<trajectory>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| match e {
                Error::Io { source, .. } => io(source),
                other => other,
            })
    }
}
