use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpas_core::mission::{FailureMode, Mission, RunRecord, ScenarioConfig};
use rpas_core::montecarlo::{
    communicability_curves, read_records_csv, run_sweep, success_surface, write_records_csv, Axis, EnvelopeGrid,
    GridUniform, SweepConfig, SweepRecord,
};
use rpas_core::rcp::MessageSpec;

fn synthetic(n: usize, seed: u64) -> Vec<SweepRecord> {
    let cfg = SweepConfig {
        base_seed: seed,
        n_samples: n,
        ..SweepConfig::default()
    };
    (0..n)
        .map(|i| {
            let run = cfg.run_config(i);
            let success = run.p_a - 5.0 * run.epsilon > 0.6;
            SweepRecord {
                run_id: i,
                record: RunRecord {
                    success,
                    completion_time: success.then_some(40.0 + 100.0 * run.epsilon),
                    failure_mode: (!success).then_some(FailureMode::Timeout),
                    waypoints_reached: if success { 3 } else { 1 },
                    p_a: run.p_a,
                    epsilon: run.epsilon,
                    seed: run.seed,
                },
            }
        })
        .collect()
}

fn axes() -> (Axis, Axis) {
    (Axis::uniform(0.5, 1.0, 10).unwrap(), Axis::uniform(0.0, 0.1, 10).unwrap())
}

#[test]
fn grid_merge_is_associative_and_order_free() {
    let records = synthetic(3000, 1);
    let (pa, eps) = axes();
    let whole = EnvelopeGrid::from_records(&records, pa.clone(), eps.clone()).unwrap();
    let parts: Vec<EnvelopeGrid> = records
        .chunks(1000)
        .map(|c| EnvelopeGrid::from_records(c, pa.clone(), eps.clone()).unwrap())
        .collect();
    let left = parts[0].merge(&parts[1]).unwrap().merge(&parts[2]).unwrap();
    let right = parts[0].merge(&parts[1].merge(&parts[2]).unwrap()).unwrap();
    same(&left, &right);
    same(&left, &whole);
    assert_eq!(whole.total(), 3000);

    let mut shuffled = records.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    same(&EnvelopeGrid::from_records(&shuffled, pa, eps).unwrap(), &whole);
}

/// Counts must match exactly; time sums only up to reassociation rounding.
fn same(a: &EnvelopeGrid, b: &EnvelopeGrid) {
    assert_eq!((&a.p_a, &a.epsilon), (&b.p_a, &b.epsilon));
    for ((i, j, x), (_, _, y)) in a.iter().zip(b.iter()) {
        assert_eq!((x.count, x.successes, x.time_count), (y.count, y.successes, y.time_count), "cell ({i}, {j})");
        assert!((x.time_sum - y.time_sum).abs() <= 1e-9 * x.time_sum.abs().max(1.0));
    }
}

#[test]
fn mismatched_axes_do_not_merge() {
    let (pa, eps) = axes();
    let a = EnvelopeGrid::empty(pa, eps.clone());
    let b = EnvelopeGrid::empty(Axis::uniform(0.5, 1.0, 5).unwrap(), eps);
    assert!(a.merge(&b).is_err());
}

#[test]
fn surface_counts_every_record() {
    let records = synthetic(2000, 2);
    let grid = success_surface(&records, (0.5, 1.0, 5), (0.0, 0.1, 4)).unwrap();
    assert_eq!(grid.total(), 2000);
    // Best corner always succeeds by construction, worst never does.
    assert_eq!(grid.cell(4, 0).success_rate(), Some(1.0));
    assert_eq!(grid.cell(0, 3).success_rate(), Some(0.0));
}

#[test]
fn curves_keep_every_record() {
    let records = synthetic(2000, 3);
    let eps = Axis::uniform(0.0, 0.1, 5).unwrap();
    let pc = Axis::uniform(0.0, 1.0, 20).unwrap();
    let curves = communicability_curves(&records, &MessageSpec::acars_control_frame(), &eps, &pc).unwrap();
    assert_eq!(curves.iter().map(|p| p.stats.count).sum::<u64>(), 2000);
    assert!(curves.iter().all(|p| p.stats.count > 0));
}

#[test]
fn records_csv_round_trips_through_a_file() {
    let records = synthetic(500, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    write_records_csv(std::fs::File::create(&path).unwrap(), &records).unwrap();
    let back = read_records_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, records);
}

#[test]
fn samples_lie_on_the_grid() {
    let cfg = SweepConfig::default();
    let grid = GridUniform::new(0.5, 1.0, 1e-3).unwrap();
    for i in 0..2000 {
        let r = cfg.run_config(i);
        let k = ((r.p_a - 0.5) / 1e-3).round();
        assert_eq!(r.p_a, grid.point(k as u64));
        assert!((0.0..=0.1).contains(&r.epsilon));
    }
}

#[test]
fn real_sweep_is_worker_count_invariant() {
    let m = Mission::with_defaults(ScenarioConfig::scenario2()).unwrap();
    let sweep = |workers| {
        let cfg = SweepConfig {
            n_samples: 24,
            base_seed: 77,
            workers: Some(workers),
            ..SweepConfig::default()
        };
        run_sweep(&m, &cfg).unwrap()
    };
    let one = sweep(1);
    assert_eq!(one, sweep(4));
    assert_eq!(one.len(), 24);
    assert!(one.iter().enumerate().all(|(i, r)| r.run_id == i));
}
