//! CSV encodings of sweep records, surfaces, curves and blockage reports.
//! Absent values are empty fields. Floats use the shortest representation
//! that round-trips, so re-reading a file reproduces it exactly.

use super::aggregate::{CurvePoint, EnvelopeGrid};
use super::blockage::BlockageReport;
use super::SweepRecord;
use crate::error::{Error, Result};
use crate::mission::{FailureMode, RunRecord};
use std::io::{Read, Write};

pub const RECORDS_HEADER: [&str; 8] = [
    "run_id",
    "p_a",
    "epsilon",
    "seed",
    "success",
    "completion_time_s",
    "failure_mode",
    "waypoints_reached",
];

pub const SURFACE_HEADER: [&str; 7] = [
    "pa_bin_lo",
    "pa_bin_hi",
    "eps_bin_lo",
    "eps_bin_hi",
    "count",
    "success_rate",
    "mean_completion_time_s",
];

pub const CURVES_HEADER: [&str; 5] = ["eps_interval_lo", "eps_interval_hi", "p_comm_bin", "success_rate", "count"];

pub const BLOCKAGE_HEADER: [&str; 3] = ["epsilon", "success", "completion_time_s"];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Bin edges and centres, rounded to 12 significant digits so that
/// `0.85` does not print as `0.8500000000000001`.
fn edge(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    rounded.to_string()
}

fn flush<W: Write>(w: csv::Writer<W>) -> Result<W> {
    w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e.into_error(),
    })
}

pub fn write_records_csv(out: impl Write, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        let rec = &r.record;
        w.write_record([
            r.run_id.to_string(),
            rec.p_a.to_string(),
            rec.epsilon.to_string(),
            rec.seed.to_string(),
            rec.success.to_string(),
            opt(rec.completion_time),
            opt(rec.failure_mode),
            rec.waypoints_reached.to_string(),
        ])?;
    }
    flush(w)?;
    Ok(())
}

pub fn read_records_csv(input: impl Read) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(RECORDS_HEADER) {
        return Err(Error::Config(format!(
            "records header mismatch: expected {}, got {}",
            RECORDS_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, row) in rd.records().enumerate() {
        let row = row?;
        let bad = |col: &str| Error::Config(format!("records row {}: bad {col} '{}'", line + 1, field(&row, col)));
        let num = |col: &str| field(&row, col).parse::<f64>().map_err(|_| bad(col));
        let int = |col: &str| field(&row, col).parse::<u64>().map_err(|_| bad(col));
        let completion_time = match field(&row, "completion_time_s") {
            "" => None,
            _ => Some(num("completion_time_s")?),
        };
        let failure_mode = match field(&row, "failure_mode") {
            "" => None,
            s => Some(s.parse::<FailureMode>()?),
        };
        let success = field(&row, "success").parse::<bool>().map_err(|_| bad("success"))?;
        if success != completion_time.is_some() || success == failure_mode.is_some() {
            return Err(Error::Config(format!(
                "records row {}: success, completion time and failure mode disagree",
                line + 1
            )));
        }
        out.push(SweepRecord {
            run_id: int("run_id")? as usize,
            record: RunRecord {
                success,
                completion_time,
                failure_mode,
                waypoints_reached: int("waypoints_reached")? as usize,
                p_a: num("p_a")?,
                epsilon: num("epsilon")?,
                seed: int("seed")?,
            },
        });
    }
    Ok(out)
}

fn field<'a>(row: &'a csv::StringRecord, col: &str) -> &'a str {
    let i = RECORDS_HEADER.iter().position(|c| *c == col).expect("known column");
    row.get(i).unwrap_or("")
}

/// One row per cell, row-major over (p_a, epsilon). Empty cells keep their
/// row with a zero count and blank statistics.
pub fn write_surface_csv(out: impl Write, grid: &EnvelopeGrid) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SURFACE_HEADER)?;
    for (i, j, s) in grid.iter() {
        let (pa_lo, pa_hi) = grid.p_a.bounds(i);
        let (e_lo, e_hi) = grid.epsilon.bounds(j);
        w.write_record([
            edge(pa_lo),
            edge(pa_hi),
            edge(e_lo),
            edge(e_hi),
            s.count.to_string(),
            opt(s.success_rate()),
            opt(s.mean_completion_time()),
        ])?;
    }
    flush(w)?;
    Ok(())
}

/// `p_comm_bin` is the bin centre.
pub fn write_curves_csv(out: impl Write, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVES_HEADER)?;
    for p in points {
        w.write_record([
            edge(p.eps_lo),
            edge(p.eps_hi),
            edge(p.p_comm_mid()),
            opt(p.stats.success_rate()),
            p.stats.count.to_string(),
        ])?;
    }
    flush(w)?;
    Ok(())
}

/// Per-latency rows, then a `#`-prefixed band summary block.
pub fn write_blockage_csv(mut out: impl Write, report: &BlockageReport) -> Result<()> {
    let io = |source| Error::Io {
        path: "<blockage>".into(),
        source,
    };
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(BLOCKAGE_HEADER)?;
        for p in &report.points {
            w.write_record([p.epsilon.to_string(), p.success.to_string(), opt(p.completion_time)])?;
        }
        flush(w)?;
    }
    writeln!(out, "# bands: {}", report.bands.len()).map_err(io)?;
    for (k, b) in report.bands.iter().enumerate() {
        writeln!(
            out,
            "# band {}: failing epsilon {} to {} (successes at {} and {})",
            k + 1,
            b.eps_start,
            b.eps_end,
            b.success_below,
            b.success_above
        )
        .map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<SweepRecord> {
        vec![
            SweepRecord {
                run_id: 0,
                record: RunRecord {
                    success: true,
                    completion_time: Some(38.363),
                    failure_mode: None,
                    waypoints_reached: 3,
                    p_a: 0.537,
                    epsilon: 0.062,
                    seed: u64::MAX,
                },
            },
            SweepRecord {
                run_id: 1,
                record: RunRecord {
                    success: false,
                    completion_time: None,
                    failure_mode: Some(FailureMode::EnvelopeExit),
                    waypoints_reached: 1,
                    p_a: 1.0,
                    epsilon: 0.0,
                    seed: 7,
                },
            },
        ]
    }

    #[test]
    fn records_round_trip() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "run_id,p_a,epsilon,seed,success,completion_time_s,failure_mode,waypoints_reached\n"
        ));
        assert!(text.contains("0,0.537,0.062,18446744073709551615,true,38.363,,3\n"));
        assert!(text.contains("1,1,0,7,false,,envelope-exit,1\n"));
        assert_eq!(read_records_csv(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn rejects_wrong_header_and_inconsistent_rows() {
        assert!(read_records_csv("a,b\n1,2\n".as_bytes()).is_err());
        let bad = "run_id,p_a,epsilon,seed,success,completion_time_s,failure_mode,waypoints_reached\n\
                   0,0.9,0.01,1,true,,timeout,0\n";
        assert!(read_records_csv(bad.as_bytes()).is_err());
    }
}
