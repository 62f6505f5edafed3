mod common;

use common::db;
use matris::experiments::{
    csv_string, run_nf_ff_sweep, run_single, run_snr_vs_bits, run_snr_vs_power,
    ExperimentConfig, Scenario, CSV_COLUMNS,
};
use matris::PhaseResolution;

fn config(scenario: Scenario) -> ExperimentConfig {
    ExperimentConfig {
        scenario,
        workers: 2,
        ..ExperimentConfig::default()
    }
}

#[test]
fn rows_satisfy_ordering_invariants() {
    let mut cfg = config(Scenario::SnrVsBits);
    cfg.side_counts = vec![6];
    cfg.starts = 4;
    let out = run_snr_vs_bits(&cfg).unwrap();
    assert_eq!(out.rows.len(), 5 * 4);
    for r in &out.rows {
        assert!(r.snr_db_proposed_ma >= r.snr_db_fixed, "{r:?}");
        assert!(r.snr_db_proposed_ma <= r.snr_db_upper_bound + 1e-9, "{r:?}");
        assert!(r.iterations <= cfg.i_max);
    }
}

#[test]
fn two_bit_fixed_antenna_within_cos_squared_of_continuous() {
    let mut cfg = config(Scenario::SnrVsBits);
    cfg.side_counts = vec![10];
    cfg.bits = vec![2];
    cfg.starts = 3;
    let out = run_snr_vs_bits(&cfg).unwrap();
    for start in 0..3 {
        let pick = |res| {
            out.rows
                .iter()
                .find(|r| r.resolution == res && r.start == start)
                .unwrap()
        };
        let (q, c) = (pick(PhaseResolution::Bits(2)), pick(PhaseResolution::Continuous));
        // same start position on both rows
        assert_eq!(q.start_position, c.start_position);
        assert!(q.snr_db_fixed >= c.snr_db_fixed - 3.02);
        assert!(c.snr_db_proposed_ma >= c.snr_db_fixed);
    }
}

#[test]
fn mean_optimized_snr_non_decreasing_in_bits() {
    let mut cfg = config(Scenario::SnrVsBits);
    cfg.side_counts = vec![10];
    cfg.bits = vec![1, 2, 3, 4];
    cfg.starts = 10;
    let out = run_snr_vs_bits(&cfg).unwrap();
    let mean = |res| {
        let v: Vec<f64> = out
            .rows
            .iter()
            .filter(|r| r.resolution == res)
            .map(|r| 10f64.powf(r.snr_db_proposed_ma / 10.0))
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let means: Vec<f64> = cfg
        .resolutions()
        .into_iter()
        .map(mean)
        .collect();
    assert!(means.windows(2).all(|w| w[1] >= w[0]), "{means:?}");
}

#[test]
fn power_sweep_is_parallel_in_db() {
    let mut cfg = config(Scenario::SnrVsPower);
    cfg.side_counts = vec![10, 18];
    let out = run_snr_vs_power(&cfg).unwrap();
    for n in [100, 324] {
        for res in [PhaseResolution::Bits(2), PhaseResolution::Continuous] {
            let rows: Vec<_> = out.rows.iter().filter(|r| r.n == n && r.resolution == res).collect();
            assert_eq!(rows.len(), cfg.power_list_dbm.len());
            for w in rows.windows(2) {
                let dp = w[1].power_dbm - w[0].power_dbm;
                for (a, b) in [
                    (w[0].snr_db_proposed_ma, w[1].snr_db_proposed_ma),
                    (w[0].snr_db_baseline_m1, w[1].snr_db_baseline_m1),
                    (w[0].snr_db_baseline_m10, w[1].snr_db_baseline_m10),
                ] {
                    assert!((b - a - dp).abs() < 1e-9);
                }
            }
        }
    }
    for p in &cfg.power_list_dbm {
        let at = |n| {
            out.rows
                .iter()
                .find(|r| r.n == n && r.power_dbm == *p && r.resolution == PhaseResolution::Bits(2))
                .unwrap()
                .snr_db_proposed_ma
        };
        assert!(at(324) >= at(100));
    }
}

#[test]
fn swapping_hops_preserves_bound_within_one_percent() {
    let mut cfg = config(Scenario::NfFfSweep);
    cfg.side_counts = vec![10];
    cfg.d_t_sweep_m = vec![0.5, 49.5];
    let out = run_nf_ff_sweep(&cfg).unwrap();
    let rows: Vec<_> = out
        .rows
        .iter()
        .filter(|r| r.resolution == PhaseResolution::Continuous)
        .collect();
    let ub: Vec<f64> = rows.iter().map(|r| r.snr_db_upper_bound).collect();
    assert_eq!(ub.len(), 2);
    let ratio = 10f64.powf((ub[0] - ub[1]) / 10.0);
    assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    assert!(rows[0].near_field && !rows[1].near_field);
}

#[test]
fn sweep_rejects_distances_outside_total() {
    let mut cfg = config(Scenario::NfFfSweep);
    cfg.d_t_sweep_m = vec![0.5, 50.0];
    assert!(run_nf_ff_sweep(&cfg).is_err());
}

#[test]
fn single_run_emits_one_row_and_trace() {
    let cfg = config(Scenario::SingleRun);
    let out = run_single(&cfg).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert_eq!(out.traces.len(), 1);
    let trace = &out.traces[0];
    assert!(trace.is_monotone());
    assert!(trace.iterations.len() <= cfg.i_max);
    let last = trace.final_record().snr;
    assert!((db(last) - out.rows[0].snr_db_proposed_ma).abs() < 1e-9);
}

#[test]
fn csv_layout_is_versioned_and_fixed_precision() {
    let mut cfg = config(Scenario::SnrVsPower);
    cfg.side_counts = vec![4];
    cfg.power_list_dbm = vec![0.0, 10.0];
    let text = csv_string(&run_snr_vs_power(&cfg).unwrap().rows).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), CSV_COLUMNS.len());
    assert_eq!(first[0], "snr_vs_power");
    assert_eq!(first[3], "0.00000000e0");
    assert_eq!(first[16], "");
    assert_eq!(text.lines().count(), 2 + 2 * 2);
}

#[test]
fn worker_count_does_not_change_output() {
    let mut cfg = config(Scenario::SnrVsBits);
    cfg.side_counts = vec![5];
    cfg.bits = vec![1, 3];
    cfg.starts = 5;
    cfg.seed = 77;
    cfg.workers = 1;
    let a = csv_string(&run_snr_vs_bits(&cfg).unwrap().rows).unwrap();
    cfg.workers = 6;
    let b = csv_string(&run_snr_vs_bits(&cfg).unwrap().rows).unwrap();
    assert_eq!(a, b);
    cfg.seed = 78;
    let c = csv_string(&run_snr_vs_bits(&cfg).unwrap().rows).unwrap();
    assert_ne!(a, c);
}
