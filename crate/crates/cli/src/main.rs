mod args;

use args::{AggregateArgs, BlockageArgs, Cli, Command, CurvesArgs, ModelArgs, RcpCommand, SimulateArgs, SweepArgs, TrimArgs};
use clap::{CommandFactory, FromArgMatches};
use rpas_core::channel::LossPolicy;
use rpas_core::control::ControllerConfig;
use rpas_core::dynamics::{trim, AircraftParams, DEFAULT_PARAMS_JSON};
use rpas_core::mission::{Mission, RunConfig, ScenarioConfig};
use rpas_core::montecarlo::{
    detect_bands, latency_blockage_sweep, read_records_csv, run_sweep_with_progress, success_surface,
    write_blockage_csv, write_curves_csv, write_records_csv, write_surface_csv, Axis, BlockagePoint,
    BlockageReport, GridUniform, SweepConfig, SweepRecord,
};
use rpas_core::rcp;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Ok,
    MissionFailed,
}

fn version() -> String {
    let hash = Sha256::digest(DEFAULT_PARAMS_JSON.as_bytes());
    let hex: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("{} (aircraft data sha256:{hex})", env!("CARGO_PKG_VERSION"))
}

fn main() -> ExitCode {
    let cmd = Cli::command().version(&*Box::leak(version().into_boxed_str()));
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::MissionFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let ctx = Context {
        out_dir: cli.out_dir.clone(),
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Trim(a) => cmd_trim(a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Aggregate(a) => cmd_aggregate(&ctx, a),
        Command::Curves(a) => cmd_curves(&ctx, a),
        Command::Blockage(a) => cmd_blockage(&ctx, a),
        Command::Rcp(c) => cmd_rcp(c),
    }
}

struct Context {
    out_dir: Option<PathBuf>,
    quiet: bool,
}

impl Context {
    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    /// The file at `path` (relative to the output directory), or stdout.
    fn output(&self, path: Option<&Path>) -> CliResult<Box<dyn Write>> {
        Ok(match path {
            Some(p) => {
                let p = self.resolve(p);
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                let f = File::create(&p).map_err(|e| format!("{}: {e}", p.display()))?;
                Box::new(BufWriter::new(f))
            }
            None => Box::new(BufWriter::new(std::io::stdout().lock())),
        })
    }

    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn load_scenario(name: &str) -> CliResult<ScenarioConfig> {
    Ok(match name {
        "scenario1" | "s1" if !Path::new(name).exists() => ScenarioConfig::scenario1(),
        "scenario2" | "s2" if !Path::new(name).exists() => ScenarioConfig::scenario2(),
        path => ScenarioConfig::load(path)?,
    })
}

fn load_params(path: Option<&Path>) -> CliResult<AircraftParams> {
    Ok(match path {
        Some(p) => AircraftParams::load(p)?,
        None => AircraftParams::f16(),
    })
}

fn load_mission(scenario: ScenarioConfig, model: &ModelArgs) -> CliResult<Mission> {
    let params = load_params(model.params.as_deref())?;
    let controller = match &model.controller {
        Some(p) => ControllerConfig::load(p)?,
        None => ControllerConfig::default(),
    };
    Ok(Mission::new(scenario, params, &controller)?)
}

fn cmd_trim(a: &TrimArgs) -> CliResult<Outcome> {
    let params = load_params(a.params.as_deref())?;
    let t = trim(a.vt, a.alt, &params)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "vt_ftps,altitude_ft,alpha_deg,elevator_deg,throttle,power,residual,iterations")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{:e},{}",
        a.vt,
        a.alt,
        t.state.alpha().to_degrees(),
        t.command.elevator.to_degrees(),
        t.command.throttle,
        t.state.pow,
        t.residual,
        t.iterations
    )?;
    Ok(Outcome::Ok)
}

fn cmd_simulate(ctx: &Context, a: &SimulateArgs) -> CliResult<Outcome> {
    let mut scenario = load_scenario(&a.scenario)?;
    if let Some(t) = a.time_limit {
        scenario.time_limit_s = t;
    }
    let run = RunConfig {
        p_a: a.pa,
        epsilon: a.eps,
        seed: a.seed,
        loss_policy: a.loss_policy.parse::<LossPolicy>()?,
    };
    run.validate()?;
    let mission = load_mission(scenario, &a.model)?;
    let output = if a.traj_out.is_some() {
        mission.run_with_trajectory(&run)?
    } else {
        rpas_core::mission::RunOutput {
            record: mission.run(&run)?,
            trajectory: None,
        }
    };
    if let (Some(path), Some(traj)) = (&a.traj_out, &output.trajectory) {
        let path = ctx.resolve(path);
        if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        traj.export(&path)?;
        ctx.note(format!("trajectory: {} rows -> {}", traj.len(), path.display()));
    }
    let record = output.record;
    write_records_csv(std::io::stdout().lock(), &[SweepRecord { run_id: 0, record }])?;
    Ok(if record.success {
        Outcome::Ok
    } else {
        Outcome::MissionFailed
    })
}

fn cmd_sweep(ctx: &Context, a: &SweepArgs) -> CliResult<Outcome> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            SweepConfig::from_json_str(&text)?
        }
        None => SweepConfig::default(),
    };
    if let Some(n) = a.samples {
        cfg.n_samples = n;
    }
    if let Some(s) = a.seed {
        cfg.base_seed = s;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    if let Some(p) = &a.loss_policy {
        cfg.loss_policy = p.parse()?;
    }
    cfg.validate()?;
    let mission = load_mission(load_scenario(&a.scenario)?, &a.model)?;

    let step = (cfg.n_samples / 100).max(1);
    let quiet = ctx.quiet;
    let progress = move |done: usize, total: usize| {
        if !quiet && (done % step == 0 || done == total) {
            eprint!("\rsweep: {done}/{total}");
            if done == total {
                eprintln!();
            }
        }
    };
    let started = std::time::Instant::now();
    let result = run_sweep_with_progress(&mission, &cfg, &progress);
    match result {
        Ok(records) => {
            let mut out = ctx.output(a.out.as_deref())?;
            write_records_csv(&mut out, &records)?;
            out.flush()?;
            let ok = records.iter().filter(|r| r.record.success).count();
            ctx.note(format!(
                "sweep: {} runs, {ok} successful, {:.1} s",
                records.len(),
                started.elapsed().as_secs_f64()
            ));
            Ok(Outcome::Ok)
        }
        Err(aborted) => {
            let mut out = ctx.output(a.out.as_deref())?;
            write_records_csv(&mut out, &aborted.completed)?;
            out.flush()?;
            let manifest = ctx.resolve(&manifest_path(a.out.as_deref()));
            let mut m = BufWriter::new(File::create(&manifest)?);
            writeln!(m, "run_id,error")?;
            for (id, msg) in &aborted.failures {
                writeln!(m, "{id},\"{}\"", msg.replace('"', "'"))?;
            }
            m.flush()?;
            Err(format!("{aborted}; partial results written, failures listed in {}", manifest.display()).into())
        }
    }
}

fn manifest_path(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut name = p.file_name().unwrap_or_default().to_os_string();
            name.push(".failures.csv");
            p.with_file_name(name)
        }
        None => PathBuf::from("sweep.failures.csv"),
    }
}

fn read_records(path: &Path) -> CliResult<Vec<SweepRecord>> {
    let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let records = read_records_csv(std::io::BufReader::new(f))?;
    if records.is_empty() {
        return Err(format!("{}: no records", path.display()).into());
    }
    Ok(records)
}

fn cmd_aggregate(ctx: &Context, a: &AggregateArgs) -> CliResult<Outcome> {
    let records = read_records(&a.records)?;
    let b = &a.bins;
    let grid = success_surface(
        &records,
        (b.pa_range[0], b.pa_range[1], b.pa_bins),
        (b.eps_range[0], b.eps_range[1], b.eps_bins),
    )?;
    let mut out = ctx.output(a.out.as_deref())?;
    write_surface_csv(&mut out, &grid)?;
    out.flush()?;
    Ok(Outcome::Ok)
}

fn cmd_curves(ctx: &Context, a: &CurvesArgs) -> CliResult<Outcome> {
    let records = read_records(&a.records)?;
    let msg = rcp::MessageSpec::new(a.size_bits, a.bitrate)?;
    ctx.note(format!("tau_msg = {} s", msg.tau_msg));
    let curves = rpas_core::montecarlo::communicability_curves(
        &records,
        &msg,
        &Axis::uniform(a.eps_range[0], a.eps_range[1], a.eps_intervals)?,
        &Axis::uniform(a.pcomm_range[0], a.pcomm_range[1], a.pcomm_bins)?,
    )?;
    let mut out = ctx.output(a.out.as_deref())?;
    write_curves_csv(&mut out, &curves)?;
    out.flush()?;
    Ok(Outcome::Ok)
}

fn cmd_blockage(ctx: &Context, a: &BlockageArgs) -> CliResult<Outcome> {
    let report = match (&a.scenario, &a.records) {
        (_, Some(path)) => blockage_from_records(&read_records(path)?),
        (Some(name), None) => {
            let grid = GridUniform::new(a.eps_range[0], a.eps_range[1], a.eps_step)?;
            let eps: Vec<f64> = (0..grid.n_points()).map(|i| grid.point(i)).collect();
            let mission = load_mission(load_scenario(name)?, &a.model)?;
            ctx.note(format!("blockage: {} latencies", eps.len()));
            latency_blockage_sweep(&mission, &eps, a.loss_policy.parse()?, a.workers)?
        }
        (None, None) => return Err("either --scenario or --records is required".into()),
    };
    ctx.note(format!("blockage: {} band(s) flagged", report.bands.len()));
    let mut out = ctx.output(a.out.as_deref())?;
    write_blockage_csv(&mut out, &report)?;
    out.flush()?;
    Ok(Outcome::Ok)
}

fn blockage_from_records(records: &[SweepRecord]) -> BlockageReport {
    let mut sorted: Vec<_> = records.iter().map(|r| r.record).collect();
    sorted.sort_by(|x, y| x.epsilon.total_cmp(&y.epsilon));
    let mut points: Vec<BlockagePoint> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for r in sorted {
        match points.last_mut() {
            Some(p) if p.epsilon == r.epsilon => {
                p.success &= r.success;
                if p.failure_mode.is_none() {
                    p.failure_mode = r.failure_mode;
                }
            }
            _ => {
                times.clear();
                points.push(BlockagePoint {
                    epsilon: r.epsilon,
                    success: r.success,
                    completion_time: None,
                    failure_mode: r.failure_mode,
                });
            }
        }
        let p = points.last_mut().expect("pushed above");
        times.extend(r.completion_time);
        p.completion_time = if p.success && !times.is_empty() {
            Some(times.iter().sum::<f64>() / times.len() as f64)
        } else {
            None
        };
    }
    let flags: Vec<(f64, bool)> = points.iter().map(|p| (p.epsilon, p.success)).collect();
    BlockageReport {
        bands: detect_bands(&flags),
        points,
    }
}

/// Twelve significant digits, then the shortest form of that value.
fn sig12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded:?}")
}

fn cmd_rcp(c: &RcpCommand) -> CliResult<Outcome> {
    let value = match *c {
        RcpCommand::Communicability {
            pa,
            tau,
            bits,
            bitrate,
            eps,
            numeric,
        } => {
            let tau = match (tau, bits, bitrate) {
                (Some(t), _, _) => t,
                (None, Some(b), Some(r)) => rcp::message_duration(b, r)?,
                _ => return Err("give --tau or both --bits and --bitrate".into()),
            };
            if numeric {
                rcp::communicability_numeric_oracle(pa, tau, eps)?
            } else {
                rcp::communicability(pa, tau, eps)?
            }
        }
        RcpCommand::Steady { lon, loff } => rcp::steady_state_availability(&rcp::RcpRates::new(lon, loff)?)?,
        RcpCommand::Availability { lon, loff, t } => rcp::availability_at(&rcp::RcpRates::new(lon, loff)?, t)?,
        RcpCommand::Continuity { lon, loff, tau } => rcp::continuity(&rcp::RcpRates::new(lon, loff)?, tau)?,
        RcpCommand::TauMsg { bits, bitrate } => rcp::message_duration(bits, bitrate)?,
    };
    println!("{}", sig12(value));
    Ok(Outcome::Ok)
}
